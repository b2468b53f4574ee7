#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "lnip/errors.hpp"
#include "lnip/retrieval.hpp"

using namespace lnip;

namespace {

FeatureVector lbp_vec(std::vector<std::uint32_t> head) {
    head.resize(256, 0);
    return {DescriptorKind::Lbp, std::move(head)};
}

std::vector<DatasetItem> random_items(std::mt19937& rng, std::size_t count, std::size_t categories) {
    std::vector<DatasetItem> items;
    for (std::size_t i = 0; i < count; ++i)
        items.push_back({"c" + std::to_string(i % categories) + "/img" + std::to_string(i) + ".png",
                         "c" + std::to_string(i % categories), fixtures::random_image(rng, 16, 12)});
    return items;
}

void write_text(const std::filesystem::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string bins_csv(std::size_t n, std::uint32_t v = 0) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s += (i ? "," : "") + std::to_string(v);
    return s;
}

}  // namespace

TEST(BuildIndex, OneEntryPerItemInOrder) {
    std::mt19937 rng(1);
    const auto items = random_items(rng, 6, 2);
    const auto index = build_index(items, DescriptorKind::Lnip);
    ASSERT_EQ(index.size(), 6u);
    for (std::size_t i = 0; i < 6; ++i) {
        EXPECT_EQ(index.entries()[i].id, items[i].id);
        EXPECT_EQ(index.entries()[i].feature.bins.size(), 512u);
        EXPECT_EQ(index.entries()[i].feature, extract_feature(items[i].image, DescriptorKind::Lnip));
    }
    EXPECT_EQ(build_index({items[0]}, DescriptorKind::Lbp).size(), 1u);
}

TEST(BuildIndex, Errors) {
    EXPECT_THROW(build_index({}, DescriptorKind::Lnip), EmptyDataset);
    std::vector<DatasetItem> items{{"ok", "a", GrayImage(5, 5)}, {"tiny/one", "a", GrayImage(2, 9)}};
    try {
        build_index(items, DescriptorKind::Lnip);
        FAIL() << "expected InvalidInput";
    } catch (const InvalidInput& e) {
        EXPECT_NE(std::string(e.what()).find("tiny/one"), std::string::npos);
    }
}

TEST(BuildIndex, ParallelMatchesSerial) {
    std::mt19937 rng(2);
    const auto items = random_items(rng, 23, 4);
    EXPECT_EQ(build_index(items, DescriptorKind::Lnip, 1), build_index(items, DescriptorKind::Lnip, 5));
}

TEST(FeatureIndex, AddValidates) {
    FeatureIndex index(DescriptorKind::Lbp);
    index.add({"a", "x", lbp_vec({1})});
    EXPECT_THROW(index.add({"a", "x", lbp_vec({2})}), InvalidInput);
    EXPECT_THROW(index.add({"b", "x", {DescriptorKind::Lnip, std::vector<std::uint32_t>(512)}}), InvalidInput);
    EXPECT_THROW(index.add({"c", "x", {DescriptorKind::Lbp, std::vector<std::uint32_t>(10)}}), InvalidInput);
}

TEST(Query, StableTieBreak) {
    FeatureIndex index(DescriptorKind::Lbp);
    index.add({"a", "x", lbp_vec({1, 0})});
    index.add({"b", "y", lbp_vec({0, 1})});
    index.add({"c", "x", lbp_vec({1, 0})});
    const auto r = query(index, lbp_vec({1, 0}), DistanceMetric::Manhattan, 3);
    ASSERT_EQ(r.ranked.size(), 3u);
    EXPECT_EQ(r.ranked[0].id, "a");
    EXPECT_EQ(r.ranked[1].id, "c");
    EXPECT_EQ(r.ranked[2].id, "b");
    EXPECT_EQ(r.ranked[0].distance, 0.0);
    EXPECT_EQ(r.ranked[1].distance, 0.0);
    EXPECT_EQ(r.ranked[2].distance, 2.0);
}

TEST(Query, TopNClampedAndValidated) {
    FeatureIndex index(DescriptorKind::Lbp);
    index.add({"a", "x", lbp_vec({1})});
    index.add({"b", "x", lbp_vec({2})});
    EXPECT_EQ(query(index, lbp_vec({1}), DistanceMetric::D1, 10).ranked.size(), 2u);
    EXPECT_EQ(query(index, lbp_vec({1}), DistanceMetric::D1, 1).ranked.size(), 1u);
    EXPECT_THROW(query(index, lbp_vec({1}), DistanceMetric::D1, 0), InvalidInput);
    EXPECT_THROW(query(index, {DescriptorKind::LnipSign, std::vector<std::uint32_t>(256)}, DistanceMetric::D1, 1),
                 InvalidInput);
}

TEST(Query, RankingProperties) {
    std::mt19937 rng(3);
    const auto items = random_items(rng, 30, 3);
    const auto index = build_index(items, DescriptorKind::Lnip);
    for (const auto m : kAllMetrics) {
        for (std::size_t e = 0; e < index.size(); e += 7) {
            const auto& feature = index.entries()[e].feature;
            const auto full = query(index, feature, m, index.size());
            ASSERT_EQ(full.ranked.size(), index.size());
            EXPECT_EQ(full.ranked[0].id, index.entries()[e].id) << metric_name(m);
            EXPECT_EQ(full.ranked[0].distance, 0.0);
            for (std::size_t r = 1; r < full.ranked.size(); ++r) {
                EXPECT_LE(full.ranked[r - 1].distance, full.ranked[r].distance);
                if (full.ranked[r - 1].distance == full.ranked[r].distance)
                    EXPECT_LT(full.ranked[r - 1].position, full.ranked[r].position);
            }
            // a shorter query is a prefix of the full ranking
            const auto top = query(index, feature, m, 5);
            for (std::size_t r = 0; r < 5; ++r) EXPECT_EQ(top.ranked[r].id, full.ranked[r].id);
            // the parallel scan gives the same answer
            QueryOptions par;
            par.threads = 4;
            const auto pr = query(index, feature, m, index.size(), par);
            for (std::size_t r = 0; r < pr.ranked.size(); ++r) {
                EXPECT_EQ(pr.ranked[r].id, full.ranked[r].id);
                EXPECT_EQ(pr.ranked[r].distance, full.ranked[r].distance);
            }
        }
    }
}

TEST(Rank, PreferredWinsTies) {
    const std::vector<double> d{1.0, 0.0, 0.0, 0.0, 2.0};
    EXPECT_EQ(rank(d, 5), (std::vector<std::size_t>{1, 2, 3, 0, 4}));
    EXPECT_EQ(rank(d, 5, 3), (std::vector<std::size_t>{3, 1, 2, 0, 4}));
    EXPECT_EQ(rank(d, 2, 4), (std::vector<std::size_t>{1, 2}));
}

class StoreTest : public ::testing::Test {
protected:
    fixtures::TempDir dir;
};

TEST_F(StoreTest, RoundTrip) {
    std::mt19937 rng(4);
    const auto index = build_index(random_items(rng, 6, 2), DescriptorKind::Lnip);
    save_index(index, dir / "s.lnip");
    EXPECT_EQ(load_index(dir / "s.lnip"), index);
}

TEST_F(StoreTest, RoundTripLargeCounts) {
    FeatureIndex index(DescriptorKind::LnipMagnitude);
    FeatureVector f{DescriptorKind::LnipMagnitude, std::vector<std::uint32_t>(256)};
    for (std::size_t i = 0; i < 256; ++i) f.bins[i] = static_cast<std::uint32_t>(4294967295u - i * 12345u);
    index.add({"big one", "weird cat", f});
    save_index(index, dir / "s.lnip");
    EXPECT_EQ(load_index(dir / "s.lnip"), index);
}

TEST_F(StoreTest, Format) {
    FeatureIndex index(DescriptorKind::Lbp);
    index.add({"a/1.png", "a", lbp_vec({3, 0, 7})});
    save_index(index, dir / "s.lnip");
    std::ifstream in(dir / "s.lnip");
    std::string header, record;
    std::getline(in, header);
    std::getline(in, record);
    EXPECT_EQ(header, "LNIPSTORE v1 LBP 256");
    EXPECT_EQ(record.substr(0, 16), "a/1.png\ta\t3,0,7,");
}

TEST_F(StoreTest, BinCountMismatchReportsLine) {
    write_text(dir / "s", "LNIPSTORE v1 LNIP 512\nx\tc\t" + bins_csv(512) + "\ny\tc\t" + bins_csv(256) + "\n");
    try {
        load_index(dir / "s");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST_F(StoreTest, MalformedInputs) {
    const auto expect_line = [&](const std::string& text, std::size_t line) {
        write_text(dir / "s", text);
        try {
            load_index(dir / "s");
            ADD_FAILURE() << "accepted: " << text.substr(0, 40);
        } catch (const ParseError& e) {
            EXPECT_EQ(e.line(), line) << e.what();
        }
    };
    expect_line("", 1);
    expect_line("LNIPSTORE v2 LBP 256\n", 1);
    expect_line("LNIPSTORE v1 LTP 256\n", 1);
    expect_line("LNIPSTORE v1 LBP 512\n", 1);
    expect_line("FOO v1 LBP 256\n", 1);
    expect_line("LNIPSTORE v1 LBP 256\na\tc\t" + bins_csv(256) + "\na\tc\t" + bins_csv(256) + "\n", 3);
    expect_line("LNIPSTORE v1 LBP 256\na\tc\n", 2);
    expect_line("LNIPSTORE v1 LBP 256\n\tc\t" + bins_csv(256) + "\n", 2);
    expect_line("LNIPSTORE v1 LBP 256\na\tc\t-1" + bins_csv(255).insert(0, ",") + "\n", 2);
    expect_line("LNIPSTORE v1 LBP 256\na\tc\t4294967296" + bins_csv(255).insert(0, ",") + "\n", 2);
    expect_line("LNIPSTORE v1 LBP 256\na\tc\t" + bins_csv(256) + "\n\n", 3);
}

TEST_F(StoreTest, HeaderOnlyIsEmptyIndex) {
    write_text(dir / "s", "LNIPSTORE v1 LNIP_S 256\n");
    const auto index = load_index(dir / "s");
    EXPECT_TRUE(index.empty());
    EXPECT_EQ(index.kind(), DescriptorKind::LnipSign);
}

TEST_F(StoreTest, CrlfTolerated) {
    write_text(dir / "s", "LNIPSTORE v1 LBP 256\r\na\tc\t" + bins_csv(256, 2) + "\r\n");
    EXPECT_EQ(load_index(dir / "s").entries()[0].feature.bins[255], 2u);
}

TEST_F(StoreTest, IoErrors) {
    EXPECT_THROW(load_index(dir / "missing"), IoError);
    FeatureIndex index(DescriptorKind::Lbp);
    EXPECT_THROW(save_index(index, dir / "no" / "such" / "dir" / "s"), IoError);
    index.add({"tab\tid", "c", lbp_vec({})});
    EXPECT_THROW(save_index(index, dir / "s"), InvalidInput);
}
