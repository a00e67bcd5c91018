// Exercises the shared library through its C header only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "hybridnet/hybridnet.h"

namespace fs = std::filesystem;

namespace {
fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("hn_capi_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}
}  // namespace

TEST_SUITE("capi") {
    TEST_CASE("status names and version") {
        CHECK(std::string(hn_version()).size() > 0);
        CHECK(std::string(hn_status_name(HN_CAPACITY_FAULT)) == "capacity fault");
    }

    TEST_CASE("graphs") {
        hn_graph* g = nullptr;
        REQUIRE(hn_graph_generate("path", 10, 1, 1, 0, 0, &g) == HN_OK);
        CHECK(hn_graph_n(g) == 10);
        CHECK(hn_graph_m(g) == 9);
        CHECK(hn_graph_spd(g) == 9);
        const auto file = scratch("path.txt");
        CHECK(hn_graph_save(g, file.c_str()) == HN_OK);
        hn_graph* back = nullptr;
        REQUIRE(hn_graph_load(file.c_str(), &back) == HN_OK);
        CHECK(hn_graph_m(back) == 9);
        hn_graph_free(back);
        hn_graph_free(g);

        CHECK(hn_graph_generate("moebius", 10, 1, 1, 0, 0, &g) == HN_INVALID_ARGUMENT);
        CHECK(std::string(hn_last_error()).find("moebius") != std::string::npos);
        CHECK(hn_graph_load("/nonexistent/graph.txt", &g) == HN_IO_ERROR);
        CHECK(hn_graph_generate(nullptr, 10, 1, 1, 0, 0, &g) == HN_INVALID_ARGUMENT);
        hn_graph_free(nullptr);
    }

    TEST_CASE("single-source and all-pairs runs") {
        hn_graph* g = nullptr;
        REQUIRE(hn_graph_generate("path", 16, 1, 1, 0, 0, &g) == HN_OK);
        hn_options o;
        hn_options_default(&o);
        std::vector<int64_t> d(17);
        hn_stats st{};
        REQUIRE(hn_sssp(g, "sssp_exact", 1, &o, d.data(), &st) == HN_OK);
        for (int v = 1; v <= 16; ++v) CHECK(d[v] == v - 1);
        CHECK(st.rounds > 0);
        CHECK(st.dropped == 0);
        CHECK(hn_sssp(g, "bogus", 1, &o, d.data(), &st) == HN_INVALID_ARGUMENT);

        std::vector<int64_t> m(16 * 16);
        REQUIRE(hn_apsp(g, "apsp_exact", nullptr, m.data(), nullptr) == HN_OK);
        for (int u = 0; u < 16; ++u)
            for (int v = 0; v < 16; ++v) CHECK(m[u * 16 + v] == std::abs(u - v));

        o.lambda = 1;
        o.strict = 1;
        CHECK(hn_apsp(g, "apsp_exact", &o, m.data(), &st) == HN_CAPACITY_FAULT);
        CHECK(hn_last_fault_round() > 0);
        hn_graph_free(g);
    }

    TEST_CASE("experiments, CSV and fits") {
        hn_config* c = nullptr;
        REQUIRE(hn_config_new(&c) == HN_OK);
        CHECK(hn_config_set(c, "algo", "td") == HN_OK);
        CHECK(hn_config_set(c, "n", "32,64,128") == HN_OK);
        CHECK(hn_config_set(c, "seeds", "1-5") == HN_OK);
        CHECK(hn_config_set(c, "nonsense", "1") == HN_INVALID_ARGUMENT);
        CHECK(hn_config_validate(c) == HN_OK);
        hn_records* r = nullptr;
        REQUIRE(hn_run(c, &r) == HN_OK);
        CHECK(hn_records_count(r) == 15);
        CHECK(hn_records_all_pass(r, hn_config_min_pass(c)) == 1);
        CHECK(hn_records_total_dropped(r) == 0);
        CHECK(hn_records_group_count(r) == 3);
        const char* name = nullptr;
        int passes = 0, trials = 0;
        CHECK(hn_records_group(r, 0, &name, &passes, &trials) == HN_OK);
        CHECK(trials == 5);
        CHECK(hn_records_group(r, 7, &name, &passes, &trials) == HN_INVALID_ARGUMENT);

        const auto a = scratch("a.csv"), b = scratch("b.csv");
        CHECK(hn_records_write_csv(r, a.c_str(), 0) == HN_OK);
        hn_records* again = nullptr;
        REQUIRE(hn_run(c, &again) == HN_OK);
        CHECK(hn_records_write_csv(again, b.c_str(), 0) == HN_OK);
        CHECK(slurp(a) == slurp(b));

        hn_records* read = nullptr;
        REQUIRE(hn_records_read_csv(a.c_str(), &read) == HN_OK);
        hn_fit_result f{};
        CHECK(hn_fit(read, "n", 5, &f) == HN_OK);
        CHECK(f.points == 3);
        CHECK(f.slope > 0);
        CHECK(hn_fit(read, "n", 6, &f) == HN_INVALID_ARGUMENT);

        hn_records_free(read);
        hn_records_free(again);
        hn_records_free(r);
        CHECK(hn_config_set(c, "seeds", "") == HN_OK);
        CHECK(hn_config_validate(c) == HN_INVALID_ARGUMENT);
        hn_config_free(c);

        hn_config* empty = nullptr;
        REQUIRE(hn_config_new(&empty) == HN_OK);
        CHECK(hn_config_set(empty, "n", "16") == HN_OK);
        CHECK(hn_config_validate(empty) == HN_INVALID_ARGUMENT);  // no seeds
        CHECK(hn_config_load(empty, "/nonexistent.cfg") == HN_IO_ERROR);
        hn_config_free(empty);
    }

    TEST_CASE("spanner export") {
        hn_graph* g = nullptr;
        REQUIRE(hn_graph_generate("random_connected", 64, 2, 0, 0, 0, &g) == HN_OK);
        const int marked[] = {3, 9, 17, 30, 41, 55};
        const auto gp = scratch("h.txt"), wp = scratch("h.witness");
        size_t edges = 0;
        REQUIRE(hn_spanner_export(g, marked, 6, 8, 3, 2.0, 1, gp.c_str(), wp.c_str(), &edges) == HN_OK);
        CHECK(edges > 0);
        std::ifstream w(wp);
        std::string line;
        size_t lines = 0;
        while (std::getline(w, line)) lines += !line.empty();
        CHECK(lines == edges);
        hn_graph_free(g);
        fs::remove_all(gp.parent_path());
    }
}
