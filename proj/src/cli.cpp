#include "lnip/cli.hpp"

#include <chrono>
#include <charconv>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "lnip/errors.hpp"
#include "lnip/evaluation.hpp"
#include "lnip/retrieval.hpp"

namespace fs = std::filesystem;

namespace lnip::cli {

namespace {

std::size_t parse_count(std::string_view text, std::string_view whole) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || v == 0)
        throw InvalidInput("bad retrieval count list '" + std::string(whole) + "'");
    return v;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

std::vector<std::size_t> parse_n_list(std::string_view text) {
    std::vector<std::size_t> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto item = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);

        const auto c1 = item.find(':');
        if (c1 == std::string_view::npos) {
            out.push_back(parse_count(item, text));
        } else {
            const auto rest = item.substr(c1 + 1);
            const auto c2 = rest.find(':');
            const std::size_t first = parse_count(item.substr(0, c1), text);
            const std::size_t last = parse_count(rest.substr(0, c2), text);
            const std::size_t step = c2 == std::string_view::npos ? 1 : parse_count(rest.substr(c2 + 1), text);
            if (last < first) throw InvalidInput("range end precedes start in '" + std::string(text) + "'");
            for (std::size_t n = first; n <= last; n += step) out.push_back(n);
        }
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

void cmd_tile(const RunConfig& config, std::ostream& out) {
    if (!config.tile_dims) throw InvalidInput("tile: --tile WxH is required");
    if (config.output_path.empty()) throw InvalidInput("tile: --out directory is required");

    LoadOptions opts;
    opts.tiling = config.tile_dims;
    opts.threads = config.threads;
    const auto items = load_dataset(config.dataset_root, opts);

    for (const auto& item : items) {
        // id is <category>/<filename>#<k>
        const auto hash = item.id.rfind('#');
        const fs::path source = item.id.substr(item.category.size() + 1, hash - item.category.size() - 1);
        std::ostringstream name;
        name << source.stem().string() << "_t" << std::setw(4) << std::setfill('0') << item.id.substr(hash + 1)
             << ".png";
        const fs::path dir = config.output_path / item.category;
        fs::create_directories(dir);
        write_image(dir / name.str(), item.image);
    }
    out << "wrote " << items.size() << " tiles to " << config.output_path.string() << '\n';
}

void cmd_index(const RunConfig& config, std::ostream& out, std::ostream& log) {
    if (config.store_paths.size() != 1) throw InvalidInput("index: exactly one --store is required");

    LoadOptions opts;
    opts.tiling = config.tile_dims;
    opts.threads = config.threads;
    opts.on_warning = [&](const std::string& m) { log << "warning: " << m << '\n'; };

    const auto start = Clock::now();
    const auto items = load_dataset(config.dataset_root, opts);
    const auto index = build_index(items, config.kind, config.threads);
    log << "feature extraction: " << std::fixed << std::setprecision(3) << seconds_since(start) << " s for "
        << items.size() << " images\n";

    save_index(index, config.store_paths.front());
    out << "indexed " << index.size() << " entries, feature length " << index.feature_length() << " ("
        << kind_name(index.kind()) << ")\n";
}

void cmd_query(const RunConfig& config, std::ostream& out) {
    if (config.store_paths.size() != 1) throw InvalidInput("query: exactly one --store is required");
    if (config.top_n == 0) throw InvalidInput("query: --top must be at least 1");

    const auto index = load_index(config.store_paths.front());
    if (config.kind_given && config.kind != index.kind())
        throw InvalidInput("store holds " + std::string(kind_name(index.kind())) + " features but --kind requests " +
                           std::string(kind_name(config.kind)));

    const auto image = read_image(config.query_image);
    const auto feature = extract_feature(image, index.kind(), config.threads);

    QueryOptions qopts;
    qopts.normalize = config.normalize;
    qopts.threads = config.threads;
    qopts.query_id = config.query_image.string();
    const auto result = query(index, feature, config.metrics.front(), config.top_n, qopts);

    out << "rank\tid\tcategory\tdistance\n";
    std::size_t r = 0;
    for (const auto& hit : result.ranked)
        out << ++r << '\t' << hit.id << '\t' << hit.category << '\t' << std::fixed << std::setprecision(6)
            << hit.distance << '\n';
}

void cmd_evaluate(const RunConfig& config, std::ostream& out, std::ostream& log) {
    if (config.store_paths.empty()) throw InvalidInput("evaluate: at least one --store is required");
    if (config.output_path.empty()) throw InvalidInput("evaluate: --out is required");

    EvalOptions eopts;
    eopts.normalize = config.normalize;
    eopts.threads = config.threads;

    std::vector<EvalReport> reports;
    for (const auto& store : config.store_paths) {
        const auto index = load_index(store);
        if (config.kind_given && config.kind != index.kind())
            throw InvalidInput(store.string() + " holds " + std::string(kind_name(index.kind())) +
                               " features but --kind requests " + std::string(kind_name(config.kind)));

        auto n_list = config.n_list;
        if (n_list.empty()) {
            // default: retrieve one category's worth
            std::map<std::string, std::size_t> sizes;
            for (const auto& e : index.entries()) ++sizes[e.category];
            std::size_t largest = 0;
            for (const auto& [cat, size] : sizes) largest = std::max(largest, size);
            n_list.push_back(largest);
        }

        for (const auto metric : config.metrics) {
            const auto start = Clock::now();
            auto part = evaluate(index, metric, n_list, eopts);
            log << "evaluated " << kind_name(index.kind()) << '/' << metric_name(metric) << " over " << index.size()
                << " queries in " << std::fixed << std::setprecision(3) << seconds_since(start) << " s\n";
            reports.insert(reports.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
        }
    }

    emit_report(reports, config.output_path);
    if (!config.curve_path.empty()) emit_curve(reports, config.curve_path);

    out << "kind\tmetric\tn\tP_total\tR_total\n";
    out << std::fixed << std::setprecision(4);
    for (const auto& r : reports)
        out << kind_name(r.kind) << '\t' << metric_name(r.metric) << '\t' << r.n_retrieved << '\t'
            << r.precision_total << '\t' << r.recall_total << '\n';
}

namespace {

const std::vector<std::string> kKindChoices{"lbp", "lnip-s", "lnip-m", "lnip"};
const std::vector<std::string> kMetricChoices{"d1", "euclidean", "manhattan", "canberra", "chi-square", "chi_square"};

struct RawFlags {
    std::string dataset;
    std::vector<std::string> stores;
    std::string kind;
    std::vector<std::string> metrics;
    std::string n_list;
    std::string tile;
    std::string out;
    std::string curve;
    std::string image;
    std::size_t top = 10;
    unsigned threads = 0;
    bool normalize = false;
};

void add_threads(CLI::App* cmd, RawFlags& raw) {
    cmd->add_option("--threads", raw.threads, "Worker threads (0 = machine parallelism)")
        ->envname("LNIP_THREADS")
        ->capture_default_str();
}

void add_kind(CLI::App* cmd, RawFlags& raw, const std::string& help) {
    cmd->add_option("--kind", raw.kind, help)->check(CLI::IsMember(kKindChoices, CLI::ignore_case));
}

RunConfig to_config(Command command, const RawFlags& raw) {
    RunConfig c;
    c.command = command;
    c.dataset_root = raw.dataset;
    for (const auto& s : raw.stores) c.store_paths.emplace_back(s);
    if (!raw.kind.empty()) {
        c.kind = parse_kind(raw.kind);
        c.kind_given = true;
    }
    if (!raw.metrics.empty()) {
        c.metrics.clear();
        for (const auto& m : raw.metrics) c.metrics.push_back(parse_metric(m));
    }
    if (!raw.n_list.empty()) c.n_list = parse_n_list(raw.n_list);
    if (!raw.tile.empty()) c.tile_dims = parse_tile_size(raw.tile);
    c.normalize = raw.normalize;
    c.output_path = raw.out;
    c.curve_path = raw.curve;
    c.query_image = raw.image;
    c.top_n = raw.top;
    c.threads = raw.threads;
    return c;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Texture descriptors (LBP, LNIP) and content-based image retrieval"};
    app.name("lnip");
    app.require_subcommand(1);
    app.set_config("--config", "", "Read flags from a TOML/INI file; command-line flags take precedence");

    RawFlags raw;

    auto* tile_cmd = app.add_subcommand("tile", "Cut every dataset image into non-overlapping tiles");
    tile_cmd->add_option("--dataset", raw.dataset, "Dataset root (category directories or manifest)")->required();
    tile_cmd->add_option("--tile", raw.tile, "Tile size WxH, e.g. 128x128")->required();
    tile_cmd->add_option("--out", raw.out, "Output directory; category structure is mirrored")->required();
    add_threads(tile_cmd, raw);

    auto* index_cmd = app.add_subcommand("index", "Extract features for a dataset and write a feature store");
    index_cmd->add_option("--dataset", raw.dataset, "Dataset root (category directories or manifest)")->required();
    index_cmd->add_option("--store", raw.stores, "Feature store to write")->required()->expected(1);
    add_kind(index_cmd, raw, "Descriptor (default lnip)");
    index_cmd->add_option("--tile", raw.tile, "Tile each image to WxH before indexing");
    add_threads(index_cmd, raw);

    auto* query_cmd = app.add_subcommand("query", "Rank the stored images against a query image");
    query_cmd->add_option("--store", raw.stores, "Feature store to search")->required()->expected(1);
    query_cmd->add_option("--image", raw.image, "Query image")->required();
    query_cmd->add_option("--top", raw.top, "Number of results to print")->capture_default_str();
    add_kind(query_cmd, raw, "Expected descriptor; must match the store (default: the store's)");
    query_cmd->add_option("--metric", raw.metrics, "Distance (default d1)")
        ->expected(1)
        ->check(CLI::IsMember(kMetricChoices));
    query_cmd->add_flag("--normalize", raw.normalize, "L1-normalize histograms before measuring distance");
    add_threads(query_cmd, raw);

    auto* eval_cmd = app.add_subcommand("evaluate", "Precision/recall over every stored image used as a query");
    eval_cmd->add_option("--store", raw.stores, "Feature store(s) to evaluate")->required();
    add_kind(eval_cmd, raw, "Expected descriptor; every store must match");
    eval_cmd->add_option("--metric", raw.metrics, "Distance(s) (default d1)")->check(CLI::IsMember(kMetricChoices));
    eval_cmd->add_option("--n", raw.n_list,
                         "Retrieval counts, e.g. 25:70:5 or 16,32,48 (default: largest category size)");
    eval_cmd->add_option("--out", raw.out, "Per-category CSV report")->required();
    eval_cmd->add_option("--curve", raw.curve, "Optional CSV of (n, P_total, R_total) per descriptor/metric");
    eval_cmd->add_flag("--normalize", raw.normalize, "L1-normalize histograms before measuring distance");
    add_threads(eval_cmd, raw);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*tile_cmd) {
            cmd_tile(to_config(Command::Tile, raw), out);
        } else if (*index_cmd) {
            cmd_index(to_config(Command::Index, raw), out, err);
        } else if (*query_cmd) {
            cmd_query(to_config(Command::Query, raw), out);
        } else if (*eval_cmd) {
            cmd_evaluate(to_config(Command::Evaluate, raw), out, err);
        }
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace lnip::cli
