#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "imputeforge/dataset.hpp"
#include "support.hpp"

using namespace imputeforge;
namespace ts = testsupport;

namespace {

std::vector<ColumnSchema> toy_schema() {
    return {
        {"Churn", ColumnKind::Categorical, "whether the customer churns", ColumnRole::Target},
        {"Age", ColumnKind::Numerical, "age of the customer", ColumnRole::Feature},
        {"FrequentFlyer", ColumnKind::Categorical, "whether the customer flies often",
         ColumnRole::Feature},
    };
}

Dataset load_toy(const std::string& body,
                 const std::vector<std::string>& sentinels = {"", "NA", "No Record"}) {
    auto dir = ts::make_temp_dir("dataset");
    auto path = dir / "toy.csv";
    ts::spit(path, body);
    return load_csv(path.string(), toy_schema(), sentinels);
}

}  // namespace

TEST_CASE("load_csv marks sentinel cells missing") {
    Dataset d = load_toy("Churn,Age,FrequentFlyer\n1,30,Yes\n0,25,NA\n0,41,No\n");
    REQUIRE(d.row_count() == 3);
    std::size_t missing = 0;
    for (std::size_t r = 0; r < d.row_count(); ++r) {
        for (std::size_t c = 0; c < d.column_count(); ++c) missing += d.missing(r, c) ? 1 : 0;
    }
    CHECK(missing == 1);
    CHECK(d.missing(1, 2));
    CHECK(d.value(0, 2) == "Yes");
    CHECK(d.number(0, 1) == 30.0);
}

TEST_CASE("load_csv trims cells and matches sentinels after trimming") {
    Dataset d = load_toy("Churn,Age,FrequentFlyer\n1, 30 , Yes \n0,25,  NA \n0,41,No\n");
    CHECK(d.value(0, 1) == "30");
    CHECK(d.value(0, 2) == "Yes");
    CHECK(d.missing(1, 2));
}

TEST_CASE("load_csv rejects a header that differs from the schema") {
    auto dir = ts::make_temp_dir("dataset");
    auto path = dir / "bad.csv";
    ts::spit(path, "Churn,Age,Flyer\n1,30,Yes\n0,22,No\n");
    CHECK_THROWS_AS(load_csv(path.string(), toy_schema()), SchemaMismatch);
}

TEST_CASE("load_csv reports unparsable numeric cells") {
    CHECK_THROWS_AS(load_toy("Churn,Age,FrequentFlyer\n1,30,Yes\n0,old,No\n"), UnparsableNumeric);
}

TEST_CASE("load_csv rejects rows with a missing target") {
    CHECK_THROWS_AS(load_toy("Churn,Age,FrequentFlyer\n1,30,Yes\nNA,22,No\n"), MissingTarget);
}

TEST_CASE("load_csv rejects empty inputs") {
    CHECK_THROWS_AS(load_toy("Churn,Age,FrequentFlyer\n"), EmptyDataset);
    CHECK_THROWS_AS(load_toy(""), EmptyDataset);
}

TEST_CASE("load_csv rejects non-binary targets") {
    CHECK_THROWS_AS(load_toy("Churn,Age,FrequentFlyer\n1,30,Yes\n2,31,No\n3,32,No\n"),
                    NonBinaryTarget);
}

TEST_CASE("numeric cells are canonicalized on load") {
    Dataset d = load_toy("Churn,Age,FrequentFlyer\n1,30.000000,Yes\n0,25.5,No\n");
    CHECK(d.value(0, 1) == "30");
    CHECK(d.value(1, 1) == "25.5");
}

TEST_CASE("split_complete_incomplete partitions and preserves order") {
    Dataset d = load_toy(
        "Churn,Age,FrequentFlyer\n1,30,Yes\n0,25,NA\n0,41,No\n1,22,NA\n0,35,Yes\n");
    auto [complete, incomplete] = split_complete_incomplete(d);
    REQUIRE(complete.row_count() == 3);
    REQUIRE(incomplete.row_count() == 2);
    CHECK(complete.source_row(0) == 0);
    CHECK(complete.source_row(1) == 2);
    CHECK(complete.source_row(2) == 4);
    CHECK(incomplete.source_row(0) == 1);
    CHECK(incomplete.source_row(1) == 3);

    Dataset all = load_toy("Churn,Age,FrequentFlyer\n1,30,Yes\n0,25,No\n");
    auto [c2, i2] = split_complete_incomplete(all);
    CHECK(c2.row_count() == 2);
    CHECK(i2.row_count() == 0);
}

TEST_CASE("class_partition finds majority and breaks ties lexicographically") {
    Dataset d = load_toy("Churn,Age,FrequentFlyer\n0,30,Yes\n0,31,No\n1,32,Yes\n");
    ClassPartition p = class_partition(d);
    CHECK(p.majority_label == "0");
    CHECK(p.minority_label == "1");
    CHECK(p.rows("0").size() == 2);

    Dataset tie = load_toy("Churn,Age,FrequentFlyer\n1,30,Yes\n0,31,No\n");
    ClassPartition pt = class_partition(tie);
    CHECK(pt.majority_label == "0");  // lexicographically smaller label wins the tie
    CHECK(pt.minority_label == "1");
}

TEST_CASE("inject_missingness marks exactly the requested counts per class") {
    std::string body = "Churn,Age,FrequentFlyer\n";
    for (int i = 0; i < 12; ++i) body += "0," + std::to_string(30 + i) + ",Yes\n";
    for (int i = 0; i < 8; ++i) body += "1," + std::to_string(20 + i) + ",No\n";
    Dataset d = load_toy(body);

    MissingnessSpec spec{"FrequentFlyer", {{"0", 4}, {"1", 3}}, 7};
    InjectionResult result = inject_missingness(d, spec);
    std::size_t col = d.column_index("FrequentFlyer");

    std::map<std::string, std::size_t> counts;
    for (std::size_t r = 0; r < result.dataset.row_count(); ++r) {
        if (result.dataset.missing(r, col)) ++counts[result.dataset.value(r, 0)];
    }
    CHECK(counts["0"] == 4);
    CHECK(counts["1"] == 3);
    REQUIRE(result.audit.size() == 7);
    for (const auto& rec : result.audit) {
        CHECK(rec.column == "FrequentFlyer");
        CHECK((rec.original_value == "Yes" || rec.original_value == "No"));
        CHECK(result.dataset.missing(rec.row_index, col));
        CHECK_FALSE(d.missing(rec.row_index, col));
    }

    SECTION("same seed twice gives identical masks") {
        InjectionResult again = inject_missingness(d, spec);
        for (std::size_t r = 0; r < d.row_count(); ++r) {
            CHECK(again.dataset.missing(r, col) == result.dataset.missing(r, col));
        }
    }
    SECTION("zero counts leave the dataset unchanged") {
        InjectionResult none = inject_missingness(d, {"FrequentFlyer", {{"0", 0}, {"1", 0}}, 7});
        CHECK(none.audit.empty());
        for (std::size_t r = 0; r < d.row_count(); ++r) {
            CHECK_FALSE(none.dataset.missing(r, col));
        }
    }
    SECTION("infeasible counts are rejected") {
        CHECK_THROWS_AS(inject_missingness(d, {"FrequentFlyer", {{"1", 9}}, 7}), InfeasibleCount);
    }
    SECTION("injecting into the target is rejected") {
        CHECK_THROWS_AS(inject_missingness(d, {"Churn", {{"0", 1}}, 7}), InvalidSchema);
    }
}

TEST_CASE("injection adds to pre-existing missingness without touching it") {
    std::string body = "Churn,Age,FrequentFlyer\n";
    body += "0,30,NA\n";  // pre-existing gap in class 0
    for (int i = 0; i < 9; ++i) body += "0," + std::to_string(31 + i) + ",Yes\n";
    for (int i = 0; i < 6; ++i) body += "1," + std::to_string(20 + i) + ",No\n";
    Dataset d = load_toy(body);
    std::size_t col = d.column_index("FrequentFlyer");

    InjectionResult result = inject_missingness(d, {"FrequentFlyer", {{"0", 2}, {"1", 1}}, 5});
    std::map<std::string, std::size_t> missing_by_class;
    for (std::size_t r = 0; r < result.dataset.row_count(); ++r) {
        if (result.dataset.missing(r, col)) ++missing_by_class[result.dataset.value(r, 0)];
    }
    CHECK(missing_by_class["0"] == 3);  // 1 pre-existing + 2 injected
    CHECK(missing_by_class["1"] == 1);
    CHECK(result.dataset.missing(0, col));  // the original gap is untouched
    REQUIRE(result.audit.size() == 3);      // only the injected cells are audited
    for (const auto& rec : result.audit) CHECK(rec.row_index != 0);
}

TEST_CASE("write_csv surfaces filesystem failures") {
    Dataset d = load_toy("Churn,Age,FrequentFlyer\n1,30,Yes\n0,25,No\n");
    CHECK_THROWS_AS(write_csv(d, "/nonexistent_dir_zzz/out.csv"), IoFailure);
}

TEST_CASE("sample_examples draws disjoint per-class sets deterministically") {
    std::string body = "Churn,Age,FrequentFlyer\n";
    for (int i = 0; i < 15; ++i) body += "0," + std::to_string(30 + i) + ",Yes\n";
    for (int i = 0; i < 9; ++i) body += "1," + std::to_string(20 + i) + ",No\n";
    Dataset d = load_toy(body);
    ClassPartition p = class_partition(d);

    auto sets = sample_examples(d, p, 3, 2, 42);
    REQUIRE(sets.size() == 2);
    std::set<std::size_t> seen;
    for (const auto& set : sets) {
        REQUIRE(set.rows_by_label.at("0").size() == 3);
        REQUIRE(set.rows_by_label.at("1").size() == 3);
        for (const auto& [label, rows] : set.rows_by_label) {
            for (std::size_t r : rows) {
                CHECK(seen.insert(r).second);  // no duplicates across the prompt
                CHECK(d.value(r, 0) == label);
            }
        }
    }

    auto again = sample_examples(d, p, 3, 2, 42);
    for (std::size_t s = 0; s < sets.size(); ++s) {
        CHECK(again[s].rows_by_label == sets[s].rows_by_label);
    }

    auto empty = sample_examples(d, p, 0, 2, 42);
    for (const auto& set : empty) {
        for (const auto& [label, rows] : set.rows_by_label) CHECK(rows.empty());
    }

    CHECK_THROWS_AS(sample_examples(d, p, 5, 2, 42), InsufficientCompleteRows);
}

TEST_CASE("write then load reproduces values, kinds and mask") {
    std::mt19937_64 gen(20240811);
    for (int trial = 0; trial < 20; ++trial) {
        Dataset d = ts::random_mixed_dataset(gen);
        auto dir = ts::make_temp_dir("roundtrip");
        auto path = dir / "out.csv";
        write_csv(d, path.string());
        Dataset back = load_csv(path.string(), d.schema(), d.sentinels());
        REQUIRE(back.row_count() == d.row_count());
        for (std::size_t r = 0; r < d.row_count(); ++r) {
            for (std::size_t c = 0; c < d.column_count(); ++c) {
                CHECK(back.missing(r, c) == d.missing(r, c));
                if (!d.missing(r, c)) CHECK(back.value(r, c) == d.value(r, c));
            }
        }
    }
}

TEST_CASE("quoted fields with commas, quotes and newlines round-trip") {
    auto dir = ts::make_temp_dir("quoted");
    auto path = dir / "quoted.csv";
    ts::spit(path,
             "Churn,Age,FrequentFlyer\n"
             "1,30,\"Yes, often\"\n"
             "0,25,\"He said \"\"no\"\"\"\n"
             "0,41,\"two\nlines\"\n");
    Dataset d = load_csv(path.string(), toy_schema(), {"NA"});
    REQUIRE(d.row_count() == 3);
    CHECK(d.value(0, 2) == "Yes, often");
    CHECK(d.value(1, 2) == "He said \"no\"");
    CHECK(d.value(2, 2) == "two\nlines");

    auto out = dir / "out.csv";
    write_csv(d, out.string());
    Dataset back = load_csv(out.string(), toy_schema(), {"NA"});
    for (std::size_t r = 0; r < 3; ++r) CHECK(back.value(r, 2) == d.value(r, 2));
}

TEST_CASE("write_csv emits the first sentinel for missing cells") {
    Dataset d = load_toy("Churn,Age,FrequentFlyer\n1,30,Yes\n0,25,No Record\n",
                         {"No Record", "NA"});
    auto dir = ts::make_temp_dir("sentinel");
    auto path = dir / "out.csv";
    write_csv(d, path.string());
    std::string text = ts::slurp(path);
    CHECK(text == "Churn,Age,FrequentFlyer\n1,30,Yes\n0,25,No Record\n");
}

TEST_CASE("integral numerics are written without fractional expansion") {
    CHECK(format_number(30.0) == "30");
    CHECK(format_number(1000000.0) == "1000000");
    CHECK(format_number(25.5) == "25.5");
    CHECK(format_number(-4.0) == "-4");
    CHECK(format_number(0.1) == "0.1");
}

TEST_CASE("schema files parse and validate") {
    auto dir = ts::make_temp_dir("schema");
    auto path = dir / "schema.json";
    ts::spit(path, R"([
      {"name": "Churn", "kind": "categorical", "description": "target flag", "role": "target"},
      {"name": "Age", "kind": "numerical", "description": "age in years", "role": "feature"}
    ])");
    auto schema = load_schema(path.string());
    REQUIRE(schema.size() == 2);
    CHECK(schema[0].role == ColumnRole::Target);
    CHECK(schema[1].kind == ColumnKind::Numerical);

    ts::spit(path, R"([{"name": "A", "kind": "categorical", "description": "x", "role": "feature"}])");
    CHECK_THROWS_AS(load_schema(path.string()), InvalidSchema);  // no target

    ts::spit(path, R"([
      {"name": "A", "kind": "categorical", "description": "", "role": "target"}
    ])");
    CHECK_THROWS_AS(load_schema(path.string()), InvalidSchema);  // empty description
}
