#include <catch2/catch_amalgamated.hpp>

#include <string>

#include <eitmem/format.hpp>
#include <eitmem/io.hpp>

using namespace eitmem;

namespace {

io::Doc doc(const std::string& text) { return io::Doc::parse_text(text); }

const char* kFullConfig = R"({
  "system": {
    "atom_counts": [50, 50],
    "probe_couplings": [0.0909090909090909, 0.1090909090909091],
    "control_weights": [1.0, 1.0]
  },
  "schedule": {"direction": "roundtrip", "ramp_time": 200.0, "peak": 20.0,
               "shape": "raised-cosine", "hold": 0.0},
  "input": {"kind": "single-photon"},
  "seed": 7
})";

}  // namespace

TEST_CASE("io: full config parses") {
    const io::RunConfig rc = io::parse_run_config(doc(kFullConfig));
    REQUIRE(rc.system.has_value());
    const SubEnsembleConfig c = rc.system->realize();
    CHECK(c.m == 2);
    CHECK(c.total_atoms == 100);
    REQUIRE(rc.schedule.has_value());
    CHECK(rc.schedule->direction == Direction::roundtrip);
    CHECK(rc.schedule->ramp_time == 200.0);
    CHECK(rc.seed == 7);
}

TEST_CASE("io: unknown keys are rejected with an anchor") {
    const char* text = R"({
  "system": {
    "atom_counts": [10],
    "probe_couplings": [0.3],
    "control_weights": [1.0],
    "atom_cuonts": [10]
  }
})";
    try {
        io::parse_run_config(doc(text));
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("unknown key 'atom_cuonts'") != std::string::npos);
        CHECK(msg.find("line 6") != std::string::npos);
    }
}

TEST_CASE("io: malformed json reports the line") {
    try {
        doc("{\n  \"system\": {,}\n}");
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("io: physical validation surfaces as schema errors") {
    const char* negative = R"({
  "system": {"atom_counts": [-50, 50], "probe_couplings": [0.1, 0.1],
             "control_weights": [1.0, 1.0]}
})";
    CHECK_THROWS_AS(io::parse_run_config(doc(negative)), SchemaError);

    const char* bad_dir = R"({
  "system": {"atom_counts": [10], "probe_couplings": [0.3], "control_weights": [1.0]},
  "schedule": {"direction": "sideways", "ramp_time": 10.0, "peak": 5.0}
})";
    CHECK_THROWS_AS(io::parse_run_config(doc(bad_dir)), SchemaError);
}

TEST_CASE("io: profile systems and rebinnable sweeps") {
    const char* text = R"({
  "system": {
    "profiles": {
      "total_atoms": 96,
      "bins": 4,
      "g_samples": [[0.125, 0.09], [0.375, 0.10], [0.625, 0.11], [0.875, 0.12]],
      "w_samples": [[0.125, 1.0], [0.375, 1.0], [0.625, 1.0], [0.875, 1.0]]
    }
  },
  "sweep": {"axis": "subensembles", "grid": [1, 2, 4]}
})";
    const io::RunConfig rc = io::parse_run_config(doc(text));
    REQUIRE(rc.system.has_value());
    CHECK(rc.system->rebinnable());
    CHECK(rc.system->realize().m == 4);
    CHECK(rc.system->realize_with_bins(2).m == 2);
    CHECK(rc.sweep_axis.value() == "subensembles");
    CHECK(rc.sweep_grid.size() == 3);
}

TEST_CASE("io: input kinds") {
    const char* fock = R"({"input": {"kind": "fock",
        "coefficients": [[0, 0], [0.70710678118654752, 0], [0, 0], [0.70710678118654752, 0]]}})";
    const io::RunConfig rf = io::parse_run_config(doc(fock));
    CHECK(rf.input.kind == InputState::Kind::fock_superposition);
    CHECK(rf.input.max_photons() == 3);

    const char* coh = R"({"input": {"kind": "coherent", "alpha": [1.5, -0.5]}})";
    const io::RunConfig rca = io::parse_run_config(doc(coh));
    CHECK(rca.input.kind == InputState::Kind::coherent);
    CHECK(rca.input.alpha == std::complex<double>(1.5, -0.5));

    const char* unnorm = R"({"input": {"kind": "fock", "coefficients": [[1, 0], [1, 0]]}})";
    CHECK_THROWS_AS(io::parse_run_config(doc(unnorm)), SchemaError);
}

TEST_CASE("io: oracle section") {
    const char* text = R"({
  "schedule": {"direction": "storage", "ramp_time": 30.0, "peak": 10.0},
  "oracle": {
    "atom_grid": [4, 6, 8, 10],
    "coupling": {"kind": "homogeneous", "g_sqrtN_total": 1.0, "w": 1.0},
    "partitions": [1],
    "photon_number": 1
  }
})";
    const io::RunConfig rc = io::parse_run_config(doc(text));
    REQUIRE(rc.oracle.has_value());
    CHECK(rc.oracle->atom_grid == std::vector<int>{4, 6, 8, 10});
    const ExactRegister reg = rc.oracle->make_register(4);
    CHECK(reg.probe_couplings[0] == Catch::Approx(0.5).margin(1e-15));
    CHECK(io::OracleRunSpec::split_sizes(10, 3) == std::vector<int>{4, 3, 3});
}

TEST_CASE("io: replay records round-trip") {
    VerifyCase vc{SubEnsembleConfig::from_couplings({10, 20}, {0.2, 0.25}, {1.0, 1.1}), 0.7,
                  std::nullopt};
    ControlSchedule sched;
    sched.direction = Direction::storage;
    sched.ramp_time = 40.0;
    sched.peak = 20.0;
    vc.schedule = sched;

    const std::string text = io::to_json("leakage", vc).dump(2);
    const auto [suite, back] = io::parse_replay_record(io::Doc::parse_text(text));
    CHECK(suite == "leakage");
    CHECK(back.config.m == 2);
    CHECK(back.config.probe_couplings[1] == vc.config.probe_couplings[1]);
    CHECK(back.f == 0.7);
    REQUIRE(back.schedule.has_value());
    CHECK(back.schedule->ramp_time == 40.0);
}

TEST_CASE("io: fixed 12-significant-digit formatting") {
    CHECK(fmt12(1.0 / 3.0) == "0.333333333333");
    CHECK(fmt12(8.19672131147541e-3) == "0.00819672131148");
    CHECK(fmt12(0.0) == "0");
    CHECK(fmt12(1e-15) == "1e-15");
    CHECK(io::num12(1.0 / 3.0).get<double>() == 0.333333333333);
}
