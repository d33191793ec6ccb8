#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "franopt/cli_io.hpp"
#include "franopt/demand.hpp"
#include "franopt/errors.hpp"
#include "franopt/model.hpp"

using namespace franopt;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(static_cast<bool>(in));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::filesystem::path temp_dir() {
    auto dir = std::filesystem::temp_directory_path() / "franopt_io_test";
    std::filesystem::create_directories(dir);
    return dir;
}

/// Minimal valid config text: a two-node topology with a radio link pair.
std::string tiny_config_text(const std::string& extra_top_level = "") {
    return std::string(R"({
  "topology": {
    "nodes": [
      {"id": "olt0", "kind": "OLT", "capacity_f": 100.0, "cpi": 1.0,
       "vm_overhead_w": 10.0, "proc_energy": 0.5},
      {"id": "enb0", "kind": "ENODEB", "capacity_f": 10.0, "cpi": 1.2,
       "vm_overhead_w": 3.0, "proc_energy": 1.5},
      {"id": "ud0", "kind": "UD", "capacity_f": 2.0, "cpi": 1.5,
       "vm_overhead_w": 0.5, "proc_energy": 2.0}
    ],
    "links": [
      {"id": "f0", "from": "olt0", "to": "enb0", "kind": "FIBRE",
       "capacity_b": 1000.0, "tx_energy": 0.01},
      {"id": "f1", "from": "enb0", "to": "olt0", "kind": "FIBRE",
       "capacity_b": 1000.0, "tx_energy": 0.01},
      {"id": "a", "from": "enb0", "to": "ud0", "kind": "LICENSED",
       "capacity_b": 200.0, "tx_energy": 0.2},
      {"id": "b", "from": "ud0", "to": "enb0", "kind": "LICENSED",
       "capacity_b": 200.0, "tx_energy": 0.2}
    ]
  })") + extra_top_level + "\n}\n";
}

}  // namespace

TEST_CASE("config: shipped default scenario has the documented shape") {
    const ScenarioConfig cfg = default_config();

    std::size_t olt = 0, onu = 0, enb = 0, ud = 0;
    for (const NodeSpec& n : cfg.topology.nodes) {
        switch (n.kind) {
            case NodeKind::OLT: ++olt; break;
            case NodeKind::ONU: ++onu; break;
            case NodeKind::ENODEB: ++enb; break;
            case NodeKind::UD: ++ud; break;
        }
    }
    CHECK(cfg.topology.nodes.size() == 26);
    CHECK(olt == 1);
    CHECK(onu == 2);
    CHECK(enb == 2);
    CHECK(ud == 21);
    // backbone 4 + fronthaul 4 + radio 42 + device chains (10 + 9) * 2
    CHECK(cfg.topology.links.size() == 88);
    CHECK(validate(cfg.topology).empty());
    CHECK(cfg.topology.requests.empty());

    const auto devices = ud_ids(cfg.topology);
    CHECK(devices.size() == 21);
    const auto requests = generate_requests(cfg.demand, devices);
    CHECK(requests.size() == 63);

    CHECK(cfg.profile.entries.size() == 24);
    CHECK(cfg.latency_grid.empty());  // automatic grid
    CHECK(cfg.workers == 1);
}

TEST_CASE("config: resolved dump is a fixed point of parsing") {
    const ScenarioConfig cfg = default_config();
    const std::string once = dump_config(cfg);
    const ScenarioConfig reparsed = parse_config_text(once);
    const std::string twice = dump_config(reparsed);
    CHECK(once == twice);

    // The reparse reproduces the semantic content, not just the bytes.
    CHECK(reparsed.topology.nodes.size() == cfg.topology.nodes.size());
    CHECK(reparsed.topology.links.size() == cfg.topology.links.size());
    CHECK(reparsed.demand.seed == cfg.demand.seed);
    CHECK(reparsed.demand.requests_per_ud == cfg.demand.requests_per_ud);
    CHECK(reparsed.solver.node_budget == cfg.solver.node_budget);
    CHECK(reparsed.profile.entries.size() == cfg.profile.entries.size());
}

TEST_CASE("config: an explicit latency grid survives the round trip") {
    ScenarioConfig cfg = default_config();
    cfg.latency_grid = {0.25, 0.5, 1.0, 4.0};
    const ScenarioConfig back = parse_config_text(dump_config(cfg));
    CHECK(back.latency_grid == cfg.latency_grid);
    CHECK(dump_config(back) == dump_config(cfg));
}

TEST_CASE("config: file round trip and missing-file error") {
    const auto dir = temp_dir();
    const auto path = dir / "roundtrip.json";
    {
        std::ofstream out(path, std::ios::binary);
        out << dump_config(default_config());
    }
    const ScenarioConfig cfg = load_config(path);
    CHECK(dump_config(cfg) == dump_config(default_config()));
    CHECK_THROWS_AS((void)load_config(dir / "does_not_exist.json"), IoError);
}

TEST_CASE("config: strict schema rejects unknown and missing keys by name") {
    SUBCASE("missing topology") {
        try {
            (void)parse_config_text("{}");
            FAIL("expected SchemaError");
        } catch (const SchemaError& e) {
            CHECK(e.key() == "topology");
        }
    }
    SUBCASE("unknown top-level key") {
        try {
            (void)parse_config_text(tiny_config_text(",\n  \"fooo\": 1"));
            FAIL("expected SchemaError");
        } catch (const SchemaError& e) {
            CHECK(e.key() == "fooo");
        }
    }
    SUBCASE("unknown node key") {
        std::string text = tiny_config_text();
        const std::string needle = "\"cpi\": 1.5";
        text.replace(text.find(needle), needle.size(),
                     "\"cpi\": 1.5, \"fooo\": 2");
        try {
            (void)parse_config_text(text);
            FAIL("expected SchemaError");
        } catch (const SchemaError& e) {
            CHECK(e.key() == "fooo");
        }
    }
    SUBCASE("bad enum string") {
        std::string text = tiny_config_text();
        const std::string needle = "\"kind\": \"ENODEB\"";
        text.replace(text.find(needle), needle.size(), "\"kind\": \"TOWER\"");
        CHECK_THROWS_AS((void)parse_config_text(text), SchemaError);
    }
    SUBCASE("wrong value type") {
        std::string text = tiny_config_text();
        const std::string needle = "\"capacity_f\": 10.0";
        text.replace(text.find(needle), needle.size(),
                     "\"capacity_f\": \"big\"");
        try {
            (void)parse_config_text(text);
            FAIL("expected SchemaError");
        } catch (const SchemaError& e) {
            CHECK(e.key() == "capacity_f");
        }
    }
    SUBCASE("non-object root") {
        CHECK_THROWS_AS((void)parse_config_text("[1, 2]"), SchemaError);
    }
}

TEST_CASE("config: malformed JSON reports line and column") {
    try {
        (void)parse_config_text("{\n  \"topology\": {\n    oops\n}}");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        const std::string what = e.what();
        CHECK(what.find("line 3") != std::string::npos);
        CHECK(what.find("column") != std::string::npos);
    }
}

TEST_CASE("config: semantic violations are validation errors") {
    SUBCASE("topology fails model validation") {
        std::string text = tiny_config_text();
        // Second node renamed to duplicate the first id.
        const std::string needle = "\"id\": \"ud0\"";
        text.replace(text.find(needle), needle.size(), "\"id\": \"enb0\"");
        CHECK_THROWS_AS((void)parse_config_text(text), ValidationError);
    }
    SUBCASE("profile fraction outside [0, 1]") {
        const std::string text = tiny_config_text(
            ",\n  \"profile\": [{\"hour\": 0, \"active_fraction\": 1.5}]");
        CHECK_THROWS_AS((void)parse_config_text(text), ValidationError);
    }
    SUBCASE("profile hours must increase") {
        const std::string text = tiny_config_text(
            ",\n  \"profile\": [{\"hour\": 5, \"active_fraction\": 0.5},"
            " {\"hour\": 5, \"active_fraction\": 0.6}]");
        CHECK_THROWS_AS((void)parse_config_text(text), ValidationError);
    }
    SUBCASE("demand range with zero minimum") {
        const std::string text = tiny_config_text(
            ",\n  \"demand\": {\"traffic_t\": {\"min\": 0.0, \"max\": 5.0}}");
        CHECK_THROWS_AS((void)parse_config_text(text), ValidationError);
    }
    SUBCASE("zero requests per device") {
        const std::string text =
            tiny_config_text(",\n  \"demand\": {\"requests_per_ud\": 0}");
        CHECK_THROWS_AS((void)parse_config_text(text), ValidationError);
    }
    SUBCASE("decreasing explicit grid") {
        const std::string text = tiny_config_text(
            ",\n  \"sweep\": {\"latency_grid\": [2.0, 1.0]}");
        CHECK_THROWS_AS((void)parse_config_text(text), ValidationError);
    }
    SUBCASE("grid string other than auto") {
        const std::string text = tiny_config_text(
            ",\n  \"sweep\": {\"latency_grid\": \"always\"}");
        CHECK_THROWS_AS((void)parse_config_text(text), SchemaError);
    }
    SUBCASE("zero workers") {
        const std::string text =
            tiny_config_text(",\n  \"solver\": {\"workers\": 0}");
        CHECK_THROWS_AS((void)parse_config_text(text), ValidationError);
    }
}

TEST_CASE("config: omitted sections fall back to defaults") {
    const ScenarioConfig cfg = parse_config_text(tiny_config_text());
    const ScenarioConfig ref;  // struct defaults
    CHECK(cfg.demand.seed == ref.demand.seed);
    CHECK(cfg.demand.requests_per_ud == ref.demand.requests_per_ud);
    CHECK(cfg.demand.arrival_a.min == ref.demand.arrival_a.min);
    CHECK(cfg.demand.traffic_t.max == ref.demand.traffic_t.max);
    CHECK(cfg.solver.node_budget == ref.solver.node_budget);
    CHECK(cfg.solver.int_tol == ref.solver.int_tol);
    CHECK(cfg.build.response_traffic_multiplier ==
          ref.build.response_traffic_multiplier);
    CHECK(cfg.workers == 1);
    CHECK(cfg.latency_grid.empty());
    CHECK(cfg.profile.entries.size() == default_profile().entries.size());
}

TEST_CASE("config: hash is stable and content-sensitive") {
    const ScenarioConfig cfg = default_config();
    const std::string h1 = config_hash(cfg);
    const std::string h2 = config_hash(cfg);
    CHECK(h1 == h2);
    CHECK(h1.size() == 16);
    CHECK(h1.find_first_not_of("0123456789abcdef") == std::string::npos);

    ScenarioConfig changed = default_config();
    changed.demand.seed = 12345;
    CHECK(config_hash(changed) != h1);
}

TEST_CASE("io: float formatting is shortest-within-17-digits and exact") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(3.0) == "3");
    CHECK(format_double(0.0) == "0");
    const double third = 1.0 / 3.0;
    CHECK(std::strtod(format_double(third).c_str(), nullptr) == third);
    const double tiny = 1e-9;
    CHECK(std::strtod(format_double(tiny).c_str(), nullptr) == tiny);
}

TEST_CASE("io: CSV layout, ordering and empty-power convention") {
    SweepResult result;
    // Deliberately scrambled input order; the writer sorts by (key, policy).
    result.rows.push_back(SweepRow{1.0, HostingPolicy::FRAN,
                                   BnbStatus::OPTIMAL,
                                   PowerBreakdown{6.25, 3.0, 1.25, 2.0}, 33});
    result.rows.push_back(SweepRow{0.5, HostingPolicy::FRAN,
                                   BnbStatus::INFEASIBLE, PowerBreakdown{}, 3});
    result.rows.push_back(SweepRow{1.0, HostingPolicy::CRAN,
                                   BnbStatus::OPTIMAL,
                                   PowerBreakdown{10.5, 5.25, 2.0, 3.25}, 7});
    result.rows.push_back(SweepRow{0.5, HostingPolicy::CRAN,
                                   BnbStatus::OPTIMAL,
                                   PowerBreakdown{1.5, 0.5, 0.5, 0.5}, 1});

    const std::string expected =
        "key,policy,status,total_w,proc_w,vm_w,traffic_w,bnb_nodes\n"
        "0.5,cran,OPTIMAL,1.5,0.5,0.5,0.5,1\n"
        "0.5,fran,INFEASIBLE,,,,,3\n"
        "1,cran,OPTIMAL,10.5,5.25,2,3.25,7\n"
        "1,fran,OPTIMAL,6.25,3,1.25,2,33\n";
    CHECK(results_csv(result) == expected);
}

TEST_CASE("io: empty sweep serializes to a header-only CSV") {
    CHECK(results_csv(SweepResult{}) ==
          "key,policy,status,total_w,proc_w,vm_w,traffic_w,bnb_nodes\n");
}

TEST_CASE("io: metadata sidecar carries provenance, no timestamps") {
    SweepResult result;
    result.rows.push_back(SweepRow{2.0, HostingPolicy::CRAN,
                                   BnbStatus::OPTIMAL,
                                   PowerBreakdown{8.0, 4.0, 2.0, 2.0}, 5});
    result.average_saving_pct = 31.25;
    result.excluded_keys = {4.0};
    result.grid = {2.0, 4.0};

    RunMeta meta;
    meta.seed = 77;
    meta.config_hash = "00ff00ff00ff00ff";

    const auto doc = nlohmann::json::parse(results_meta_json(result, meta));
    CHECK(doc.at("tool_version").get<std::string>() == kToolVersion);
    CHECK(doc.at("seed").get<std::uint64_t>() == 77);
    CHECK(doc.at("config_hash").get<std::string>() == "00ff00ff00ff00ff");
    CHECK(doc.at("rows").get<std::size_t>() == 1);
    CHECK(doc.at("average_saving_pct").get<double>() ==
          doctest::Approx(31.25));
    CHECK(doc.at("excluded_keys").get<std::vector<double>>() ==
          std::vector<double>{4.0});
    CHECK(doc.at("latency_grid").get<std::vector<double>>() ==
          std::vector<double>{2.0, 4.0});
    CHECK(!doc.contains("timestamp"));

    SUBCASE("undefined average becomes null") {
        result.average_saving_pct.reset();
        const auto doc2 =
            nlohmann::json::parse(results_meta_json(result, meta));
        CHECK(doc2.at("average_saving_pct").is_null());
    }
}

TEST_CASE("io: write_results produces both files, byte-stable across reruns") {
    SweepResult result;
    result.rows.push_back(SweepRow{3.0, HostingPolicy::FRAN,
                                   BnbStatus::OPTIMAL,
                                   PowerBreakdown{5.5, 2.5, 1.0, 2.0}, 9});
    RunMeta meta;
    meta.seed = 5;
    meta.config_hash = config_hash(default_config());

    const auto dir = temp_dir();
    const auto csv = dir / "out.csv";
    write_results(result, csv, meta);
    const std::string csv1 = slurp(csv);
    const std::string meta1 = slurp(dir / "out.meta.json");
    CHECK(csv1 == results_csv(result));
    CHECK(meta1 == results_meta_json(result, meta));

    write_results(result, csv, meta);
    CHECK(slurp(csv) == csv1);
    CHECK(slurp(dir / "out.meta.json") == meta1);

    SUBCASE("unwritable destination raises IoError") {
        CHECK_THROWS_AS(
            write_results(result, dir / "no_such_dir" / "x.csv", meta),
            IoError);
    }
}
