#include <catch2/catch_amalgamated.hpp>

#include "golden_travel.hpp"
#include "imputeforge/prompt.hpp"
#include "support.hpp"

using namespace imputeforge;
namespace ts = testsupport;

namespace {

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
    std::size_t n = 0, pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::string::npos) {
        ++n;
        pos += needle.size();
    }
    return n;
}

}  // namespace

TEST_CASE("grouped prompt carries the mandated layout") {
    RenderedPrompt p = ts::render_golden_travel();

    CHECK(p.text.find("'FrequentFlyer'") != std::string::npos);
    CHECK(p.text.find("exactly 6 values") != std::string::npos);
    CHECK(p.text.find("A. contains 3 records") != std::string::npos);
    CHECK(p.text.find("B. contains 3 records") != std::string::npos);

    const std::string header =
        "Churn, Age, AnnualIncomeClass, ServicesOpted, AccountSyncedToSocialMedia, "
        "BookedHotelOrNot, FrequentFlyer";
    CHECK(count_occurrences(p.text, header) == 2);  // one per example set

    const std::string bridge =
        "Given the above data, fill in the missing values in the data sample below:";
    CHECK(count_occurrences(p.text, bridge) == 1);
    // The missing block is header-free: nothing follows the bridge but groups.
    CHECK(p.text.find(header, p.text.find(bridge)) == std::string::npos);

    CHECK(count_occurrences(p.text, "\nA.\n") == 3);  // two example sets + missing block
    CHECK(count_occurrences(p.text, "\nB.\n") == 3);

    CHECK(p.text.find("Churn: whether customer churns or doesnt churn") != std::string::npos);

    REQUIRE(p.manifest.size() == 6);
    // Group A (Churn) rows come first, in dataset order.
    CHECK(p.manifest == std::vector<std::size_t>{20, 21, 22, 23, 24, 25});
    CHECK(p.mock.row_classes ==
          std::vector<std::string>{"Churn", "Churn", "Churn", "Doesnt churn", "Doesnt churn",
                                   "Doesnt churn"});
    CHECK(p.mock.examples_by_class.at("Churn").size() == 6);

    // Masked cells render as the missing display.
    CHECK(count_occurrences(p.text, "No Record") == 6);
    CHECK(p.estimated_tokens == (p.text.size() + 3) / 4);
}

TEST_CASE("rendering is byte-stable for a fixed seed") {
    RenderedPrompt a = ts::render_golden_travel();
    RenderedPrompt b = ts::render_golden_travel();
    CHECK(a.text == b.text);
    CHECK(a.manifest == b.manifest);

    RenderedPrompt other = ts::render_golden_travel(7);
    CHECK(other.text != a.text);  // different example draw
}

TEST_CASE("no column outside the predictor set appears in the text") {
    ts::GoldenTravel g = ts::load_golden_travel();
    PredictorSet narrow;
    narrow.feature = "FrequentFlyer";
    narrow.threshold = 0.9;
    narrow.predictors = {"Churn"};
    narrow.candidate_count = 6;
    narrow.removed_count = 5;

    auto pool = class_partition(g.dataset);
    ClassPartition complete_pool;
    for (const auto& [label, rows] : pool.row_indices_by_label) {
        for (std::size_t r : rows) {
            if (g.dataset.row_complete(r)) complete_pool.row_indices_by_label[label].push_back(r);
        }
    }
    auto examples = sample_examples(g.dataset, complete_pool, 2, 1, 3);
    RenderedPrompt p = render_grouped(g.dataset, examples, g.missing_by_class, g.config, narrow);

    CHECK(p.included_columns == std::vector<std::string>{"Churn", "FrequentFlyer"});
    for (const char* absent : {"Age", "AnnualIncomeClass", "ServicesOpted",
                               "AccountSyncedToSocialMedia", "BookedHotelOrNot"}) {
        CHECK(p.text.find(absent) == std::string::npos);
    }
}

TEST_CASE("zero example sets render instruction, descriptions, bridge and missing block only") {
    ts::GoldenTravel g = ts::load_golden_travel();
    RenderedPrompt p = render_grouped(g.dataset, {}, g.missing_by_class, g.config, g.predictors);
    CHECK(p.text.find("Churn: whether customer churns") != std::string::npos);
    CHECK(count_occurrences(p.text, "Churn, Age, AnnualIncomeClass") == 0);  // no header line
    CHECK(count_occurrences(p.text, "Given the above data") == 1);
    CHECK(p.text.find("Churn, 29, High Income") != std::string::npos);  // missing rows present
    CHECK(p.manifest.size() == 6);
}

TEST_CASE("ungrouped prompt differs only by group markers and row order") {
    ts::GoldenTravel g = ts::load_golden_travel();
    std::vector<std::vector<std::size_t>> sets{{0, 10, 1, 11, 2, 12}};
    std::vector<std::size_t> missing{20, 21, 22, 23, 24, 25};
    g.config.style = PromptStyle::Ungrouped;
    RenderedPrompt p = render_ungrouped(g.dataset, sets, missing, g.config, g.predictors);

    CHECK(p.text.find("\nA.\n") == std::string::npos);
    CHECK(p.text.find("\nB.\n") == std::string::npos);
    CHECK(count_occurrences(p.text, "Churn, Age, AnnualIncomeClass") == 1);  // one header
    CHECK(p.manifest == missing);
    CHECK(p.text.find("exactly 6 values") != std::string::npos);
    // Example rows appear in sampled order: row 0 (Churn) then row 10 (Doesnt churn).
    auto pos_first = p.text.find("Churn, 28, High Income");
    auto pos_second = p.text.find("Doesnt churn, 37, Low Income");
    REQUIRE(pos_first != std::string::npos);
    REQUIRE(pos_second != std::string::npos);
    CHECK(pos_first < pos_second);
}

TEST_CASE("token estimate follows the byte formula and shrinks with columns") {
    CHECK(estimate_tokens("") == 0);
    CHECK(estimate_tokens("12345678") == 2);
    CHECK(estimate_tokens("123456789") == 3);

    ts::GoldenTravel g = ts::load_golden_travel();
    RenderedPrompt full = ts::render_golden_travel();

    PredictorSet fewer = g.predictors;
    fewer.predictors = {"Age", "AnnualIncomeClass", "Churn"};
    auto pool = class_partition(g.dataset);
    ClassPartition complete_pool;
    for (const auto& [label, rows] : pool.row_indices_by_label) {
        for (std::size_t r : rows) {
            if (g.dataset.row_complete(r)) complete_pool.row_indices_by_label[label].push_back(r);
        }
    }
    auto examples = sample_examples(g.dataset, complete_pool, 3, 2, 20240805);
    RenderedPrompt small =
        render_grouped(g.dataset, examples, g.missing_by_class, g.config, fewer);
    CHECK(small.estimated_tokens < full.estimated_tokens);
}

TEST_CASE("collisions and incomplete examples are rejected") {
    ts::GoldenTravel g = ts::load_golden_travel();
    auto pool = class_partition(g.dataset);
    ClassPartition complete_pool;
    for (const auto& [label, rows] : pool.row_indices_by_label) {
        for (std::size_t r : rows) {
            if (g.dataset.row_complete(r)) complete_pool.row_indices_by_label[label].push_back(r);
        }
    }
    auto examples = sample_examples(g.dataset, complete_pool, 3, 2, 20240805);

    PromptConfig collide = g.config;
    collide.missing_display = "yes";  // case-insensitive clash with the Yes category
    CHECK_THROWS_AS(render_grouped(g.dataset, examples, g.missing_by_class, collide, g.predictors),
                    ColumnCollision);

    ExampleSet bad;
    bad.rows_by_label["Churn"] = {20};  // row 20 is missing FrequentFlyer
    bad.rows_by_label["Doesnt churn"] = {10};
    CHECK_THROWS_AS(
        render_grouped(g.dataset, {bad}, g.missing_by_class, g.config, g.predictors),
        IncompleteExample);
}

TEST_CASE("co-missing predictor cells render as missing display with a warning") {
    ts::GoldenTravel g = ts::load_golden_travel();
    // Mask a predictor cell in one of the missing-block rows.
    Dataset d = g.dataset;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::vector<bool>> missing;
    for (std::size_t r = 0; r < d.row_count(); ++r) {
        std::vector<std::string> row;
        std::vector<bool> miss;
        for (std::size_t c = 0; c < d.column_count(); ++c) {
            bool m = d.missing(r, c) || (r == 20 && d.schema()[c].name == "BookedHotelOrNot");
            row.push_back(m ? "" : d.value(r, c));
            miss.push_back(m);
        }
        rows.push_back(row);
        missing.push_back(miss);
    }
    Dataset masked(d.schema(), rows, missing, "", d.sentinels());

    auto pool = class_partition(masked);
    ClassPartition complete_pool;
    for (const auto& [label, rws] : pool.row_indices_by_label) {
        for (std::size_t r : rws) {
            if (masked.row_complete(r)) complete_pool.row_indices_by_label[label].push_back(r);
        }
    }
    auto examples = sample_examples(masked, complete_pool, 3, 2, 20240805);
    RenderedPrompt p = render_grouped(masked, examples, g.missing_by_class, g.config, g.predictors);
    REQUIRE_FALSE(p.warnings.empty());
    CHECK(p.warnings[0].find("BookedHotelOrNot") != std::string::npos);
    CHECK(count_occurrences(p.text, "No Record") == 7);  // 6 feature cells + 1 predictor cell
}

TEST_CASE("a custom instruction template substitutes both placeholders") {
    ts::GoldenTravel g = ts::load_golden_travel();
    g.config.instruction_template =
        "Fill {missing_count} gaps in {feature_name}. Count again: {missing_count}.";
    RenderedPrompt p = render_grouped(g.dataset, {}, g.missing_by_class, g.config, g.predictors);
    CHECK(p.text.find("Fill 6 gaps in FrequentFlyer. Count again: 6.") != std::string::npos);
    CHECK(p.text.find("{missing_count}") == std::string::npos);
    CHECK(p.text.find("{feature_name}") == std::string::npos);
}

TEST_CASE("parse_response handles line and comma forms") {
    std::vector<std::string> domain{"Yes", "No"};
    auto r1 = parse_response("Yes\nNo\nYes", 3, ColumnKind::Categorical, domain);
    CHECK(r1.values == std::vector<std::string>{"Yes", "No", "Yes"});

    auto r2 = parse_response("A.\nyes\nno\nB.\nyes", 3, ColumnKind::Categorical, domain);
    CHECK(r2.values == std::vector<std::string>{"Yes", "No", "Yes"});

    CHECK_THROWS_AS(parse_response("Yes,No", 3, ColumnKind::Categorical, domain), CountMismatch);

    auto r3 = parse_response("Yes, No, Yes", 3, ColumnKind::Categorical, domain);
    CHECK(r3.values == std::vector<std::string>{"Yes", "No", "Yes"});

    auto r4 = parse_response("\"Yes\"\n'No'\nYES,", 3, ColumnKind::Categorical, domain);
    CHECK(r4.values == std::vector<std::string>{"Yes", "No", "Yes"});

    CHECK_THROWS_AS(parse_response("Yes\nMaybe\nNo", 3, ColumnKind::Categorical, domain),
                    DomainViolation);

    auto nums = parse_response(" 1 \n2.50\n-3", 3, ColumnKind::Numerical, {});
    CHECK(nums.values == std::vector<std::string>{"1", "2.5", "-3"});
    CHECK_THROWS_AS(parse_response("1\nx\n3", 3, ColumnKind::Numerical, {}), NumericParseFailure);

    CHECK_THROWS_AS(parse_response("", 3, ColumnKind::Categorical, domain), CountMismatch);
}

TEST_CASE("parse round-trip: ground truth answers survive") {
    RenderedPrompt p = ts::render_golden_travel();
    std::vector<std::string> truth{"Yes", "No", "Yes", "No", "Yes", "No"};
    std::string raw;
    for (std::size_t i = 0; i < truth.size(); ++i) raw += truth[i] + "\n";
    auto parsed =
        parse_response(raw, p.manifest.size(), ColumnKind::Categorical, {"Yes", "No"});
    CHECK(parsed.values == truth);
}
