// Exercises the shared-library surface the way an external consumer would:
// everything goes through the C header, no C++ core types.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "drpt/drpt.h"

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path.string();
}

} // namespace

TEST_CASE("version and status names") {
    CHECK(std::string(drpt_version()) == "1.0.0");
    CHECK(std::string(drpt_status_name(DRPT_OK)) == "ok");
    CHECK(std::string(drpt_status_name(DRPT_ERR_ZERO_CELL)) == "zero_cell");
}

TEST_CASE("sample construction and accessors") {
    const double coords[6] = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
    drpt_sample* sample = nullptr;
    REQUIRE(drpt_sample_continuous(coords, 2, 2, 1, &sample) == DRPT_OK);
    CHECK(drpt_sample_n(sample) == 2);
    CHECK(drpt_sample_m(sample) == 1);
    CHECK(drpt_sample_dim(sample) == 2);
    CHECK(drpt_sample_is_categorical(sample) == 0);
    drpt_sample_free(sample);

    const int codes[4] = {0, 1, 1, 0};
    drpt_sample* cat = nullptr;
    REQUIRE(drpt_sample_categorical(codes, 2, 2, &cat) == DRPT_OK);
    CHECK(drpt_sample_is_categorical(cat) == 1);
    drpt_sample_free(cat);

    drpt_sample* bad = nullptr;
    CHECK(drpt_sample_continuous(nullptr, 2, 2, 1, &bad) == DRPT_ERR_INVALID_ARGUMENT);
}

TEST_CASE("csv loading through the C surface") {
    const auto path = write_temp("capi_sample.csv",
                                 "x1,sample,r\n"
                                 "0.5,1,1.2\n"
                                 "1.5,2,0.8\n"
                                 "0.25,1,1.1\n"
                                 "2.5,2,0.6\n");
    drpt_sample* sample = nullptr;
    REQUIRE(drpt_sample_from_csv(path.c_str(), &sample) == DRPT_OK);
    CHECK(drpt_sample_n(sample) == 2);
    CHECK(drpt_sample_has_csv_ratio(sample) == 1);

    drpt_ratio* ratio = nullptr;
    REQUIRE(drpt_sample_csv_ratio(sample, &ratio) == DRPT_OK);
    double value = 0.0;
    REQUIRE(drpt_ratio_eval(ratio, sample, 0, &value) == DRPT_OK);
    CHECK(value == 1.2);
    drpt_ratio_free(ratio);
    drpt_sample_free(sample);

    drpt_sample* missing = nullptr;
    CHECK(drpt_sample_from_csv("/does/not/exist.csv", &missing) == DRPT_ERR_IO);
    CHECK(std::string(drpt_last_error()).find("csv") != std::string::npos);
}

TEST_CASE("ratio constructors and error reporting") {
    drpt_ratio* expr = nullptr;
    REQUIRE(drpt_ratio_expression("exp(x1 - 1/2)", &expr) == DRPT_OK);
    drpt_ratio_free(expr);

    drpt_ratio* bad = nullptr;
    CHECK(drpt_ratio_expression("exp(", &bad) == DRPT_ERR_PARSE);
    CHECK(std::string(drpt_last_error()).size() > 0);

    const double negative[2] = {1.0, -1.0};
    CHECK(drpt_ratio_table(negative, 2, &bad) == DRPT_ERR_NON_POSITIVE_RATIO);

    const auto table_path = write_temp("capi_table.json", "{\"r\": [1.0, 3.0]}");
    drpt_ratio* table = nullptr;
    REQUIRE(drpt_ratio_table_from_json_file(table_path.c_str(), &table) == DRPT_OK);
    drpt_ratio_free(table);

    const auto array_path = write_temp("capi_array.json", "[2.0, 5.0]");
    REQUIRE(drpt_ratio_table_from_json_file(array_path.c_str(), &table) == DRPT_OK);
    drpt_ratio_free(table);

    const auto bad_path = write_temp("capi_bad.json", "{\"x\": 1}");
    CHECK(drpt_ratio_table_from_json_file(bad_path.c_str(), &table) == DRPT_ERR_PARSE);
}

TEST_CASE("full test run through the shared library") {
    // binary H0 data with r = (1,3)
    std::vector<int> codes;
    for (int i = 0; i < 60; ++i) codes.push_back(i % 2);
    for (int j = 0; j < 60; ++j) codes.push_back(j % 4 == 0 ? 0 : 1);
    drpt_sample* sample = nullptr;
    REQUIRE(drpt_sample_categorical(codes.data(), 60, 60, &sample) == DRPT_OK);

    const double table[2] = {1.0, 3.0};
    drpt_ratio* ratio = nullptr;
    REQUIRE(drpt_ratio_table(table, 2, &ratio) == DRPT_OK);

    drpt_config* config = nullptr;
    REQUIRE(drpt_config_new(&config) == DRPT_OK);
    REQUIRE(drpt_config_set_statistic(config, DRPT_STAT_V) == DRPT_OK);
    REQUIRE(drpt_config_set_kernel(config, DRPT_KERNEL_COLLISION) == DRPT_OK);
    REQUIRE(drpt_config_set_copies(config, 199) == DRPT_OK);
    REQUIRE(drpt_config_set_seed(config, 2718) == DRPT_OK);
    REQUIRE(drpt_config_set_path(config, DRPT_PATH_EXACT) == DRPT_OK);
    REQUIRE(drpt_config_set_alpha(config, 0.05) == DRPT_OK);
    CHECK(drpt_config_set_alpha(config, 1.5) == DRPT_ERR_INVALID_ARGUMENT);

    drpt_result* result = nullptr;
    REQUIRE(drpt_run_test(sample, ratio, config, &result) == DRPT_OK);

    double p = 0.0, t = 0.0, lambda = 0.0, ms = -1.0;
    int reject = -1;
    size_t count = 0;
    CHECK(drpt_result_p_value(result, &p) == DRPT_OK);
    CHECK(drpt_result_statistic(result, &t) == DRPT_OK);
    CHECK(drpt_result_lambda_hat(result, &lambda) == DRPT_OK);
    CHECK(drpt_result_reject(result, &reject) == DRPT_OK);
    CHECK(drpt_result_elapsed_ms(result, &ms) == DRPT_OK);
    CHECK(drpt_result_permuted_count(result, &count) == DRPT_OK);
    CHECK(count == 199);
    CHECK(p >= 1.0 / 200.0);
    CHECK(p <= 1.0);
    CHECK(lambda > 0.0);
    CHECK(ms >= 0.0);
    CHECK((reject == 0 || reject == 1));
    CHECK((p <= 0.05) == (reject == 1));

    std::vector<double> permuted(count);
    size_t written = 0;
    CHECK(drpt_result_permuted(result, permuted.data(), permuted.size(), &written) == DRPT_OK);
    CHECK(written == count);
    std::size_t geq = 0;
    for (double v : permuted) {
        if (v >= t) ++geq;
    }
    CHECK(p == static_cast<double>(1 + geq) / 200.0);

    char* json = nullptr;
    REQUIRE(drpt_result_to_json(result, &json) == DRPT_OK);
    CHECK(std::string(json).find("p_value") != std::string::npos);

    // same seed, same bytes
    drpt_result* again = nullptr;
    REQUIRE(drpt_run_test(sample, ratio, config, &again) == DRPT_OK);
    char* json2 = nullptr;
    REQUIRE(drpt_result_to_json(again, &json2) == DRPT_OK);
    CHECK(std::string(json) == std::string(json2));

    drpt_string_free(json);
    drpt_string_free(json2);
    drpt_result_free(result);
    drpt_result_free(again);
    drpt_config_free(config);
    drpt_ratio_free(ratio);
    drpt_sample_free(sample);
}

TEST_CASE("grid inversion through the shared library") {
    std::vector<int> codes;
    for (int i = 0; i < 80; ++i) codes.push_back(i % 2);
    for (int j = 0; j < 80; ++j) codes.push_back(j % 4 == 0 ? 0 : 1); // odds multiplier 3
    drpt_sample* sample = nullptr;
    REQUIRE(drpt_sample_categorical(codes.data(), 80, 80, &sample) == DRPT_OK);

    drpt_config* config = nullptr;
    REQUIRE(drpt_config_new(&config) == DRPT_OK);
    REQUIRE(drpt_config_set_statistic(config, DRPT_STAT_V) == DRPT_OK);
    REQUIRE(drpt_config_set_kernel(config, DRPT_KERNEL_COLLISION) == DRPT_OK);
    REQUIRE(drpt_config_set_seed(config, 555) == DRPT_OK);

    const double grid[4] = {0.2, 1.0, 3.0, 9.0};
    char* csv = nullptr;
    // ratio expression parameterized by t over the binary codes
    REQUIRE(drpt_invert_grid(sample, "1 + (t-1)*x1", grid, 4, config, 0.05, &csv) == DRPT_OK);
    const std::string text(csv);
    CHECK(text.rfind("candidate,p_value,accepted\n", 0) == 0);
    // four data rows
    CHECK(std::count(text.begin(), text.end(), '\n') == 5);
    drpt_string_free(csv);
    drpt_config_free(config);
    drpt_sample_free(sample);
}

TEST_CASE("wald interval through the shared library") {
    double lo = 0.0, hi = 0.0;
    REQUIRE(drpt_wald_odds_interval(30, 100, 30, 100, 0.05, &lo, &hi) == DRPT_OK);
    CHECK(lo < 1.0);
    CHECK(hi > 1.0);
    CHECK(drpt_wald_odds_interval(0, 10, 5, 10, 0.05, &lo, &hi) == DRPT_ERR_ZERO_CELL);
}

TEST_CASE("scenario runner through the shared library") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "capi_scenario";
    fs::remove_all(dir);
    char* summary = nullptr;
    const std::string cfg =
        "{\"grid\":[0.0,0.9],\"n\":30,\"m\":30,\"replicates\":20,\"copies\":49,"
        "\"sweeps\":25,\"seed\":7,\"threads\":2}";
    REQUIRE(drpt_run_scenario("e3", cfg.c_str(), dir.string().c_str(), &summary) == DRPT_OK);
    CHECK(std::string(summary).find("points") != std::string::npos);
    CHECK(fs::exists(dir / "power.csv"));
    CHECK(fs::exists(dir / "power.svg"));
    CHECK(fs::exists(dir / "manifest.json"));
    drpt_string_free(summary);

    CHECK(drpt_run_scenario("nope", cfg.c_str(), dir.string().c_str(), &summary) ==
          DRPT_ERR_INVALID_ARGUMENT);
    CHECK(drpt_run_scenario("e3", "{bad json", dir.string().c_str(), &summary) ==
          DRPT_ERR_PARSE);
    fs::remove_all(dir);
}
