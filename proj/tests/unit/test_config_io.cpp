#include "crm/config_io.hpp"
#include "crm/presets.hpp"

#include <doctest.h>

#include <string>

using namespace crm;

namespace {

const char* kSpec = R"(name: pair
engine: ode
model:
  scenario: ChasingIntraInter
  consumers: 2
  resources:
    - {kind: biotic, rate: 0.1, K0: 10}
  a: 0.5
  d: [0.5, 0.4]
  k: [[0.4], [0.3]]
  w: 0.2
  D: [0.022, 0.02]
  a_intra: 0.525
  d_intra: 0.5
  a_inter: 0.1
  d_inter: 0.2
initial:
  C: [1, 2]
  R: [5]
run:
  t_end: 1000
  samples: 11
  seed: 9
)";

}  // namespace

TEST_CASE("parse a YAML spec") {
    const auto s = parse_spec(kSpec);
    CHECK(s.name == "pair");
    CHECK(s.engine == Engine::Ode);
    CHECK(s.config.scenario == Scenario::ChasingIntraInter);
    CHECK(s.config.a(1, 0) == 0.5);
    CHECK(s.config.d(1, 0) == 0.4);
    CHECK(s.config.k(1, 0) == 0.3);
    CHECK(s.config.a_inter(0, 1) == 0.1);
    CHECK(s.config.a_inter(1, 0) == 0.1);
    CHECK(s.config.a_inter(0, 0) == 0.0);
    CHECK(s.config.resources[0].kind == ResourceKind::Biotic);
    CHECK(s.initial_C(1) == 2.0);
    CHECK(s.run.t_end == 1000.0);
    CHECK(s.run.samples == 11);
    CHECK(s.run.seed == 9);
    // Unset controls keep their defaults.
    CHECK(s.run.rel_tol == RunControls{}.rel_tol);
}

TEST_CASE("YAML and JSON round trips") {
    const auto s = parse_spec(kSpec);
    const auto y = parse_spec(spec_to_yaml(s));
    const auto j = parse_spec(spec_to_json(s));
    for (const auto* t : {&y, &j}) {
        CHECK(t->name == s.name);
        CHECK(t->config.a == s.config.a);
        CHECK(t->config.k == s.config.k);
        CHECK(t->config.D == s.config.D);
        CHECK(t->config.a_inter == s.config.a_inter);
        CHECK(t->initial_R == s.initial_R);
        CHECK(t->run.seed == s.run.seed);
    }
}

TEST_CASE("diagnostics carry line and field") {
    std::string bad = kSpec;
    bad.replace(bad.find("w: 0.2"), 6, "w: lots");
    try {
        parse_spec(bad, "bad.yaml");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 11);
        CHECK(e.field() == "model.w");
        CHECK(std::string(e.what()).find("bad.yaml:11") != std::string::npos);
    }
}

TEST_CASE("schema errors") {
    CHECK_THROWS_AS(parse_spec("name: x\nengine: warp\n"), InvalidConfig);
    CHECK_THROWS_AS(parse_spec(std::string(kSpec) + "extra: 1\n"), ParseError);
    CHECK_THROWS_AS(parse_spec("name: [unclosed\n"), ParseError);
    CHECK_THROWS_AS(parse_spec("{\"name\": }"), ParseError);
    std::string wrong_shape = kSpec;
    wrong_shape.replace(wrong_shape.find("D: [0.022, 0.02]"), 16, "D: [0.022, 0.02, 0.1]");
    CHECK_THROWS_AS(parse_spec(wrong_shape), InvalidConfig);
    std::string asym = kSpec;
    asym.replace(asym.find("a_inter: 0.1"), 12, "a_inter: [[0, 0.1], [0.2, 0]]");
    CHECK_THROWS_AS(parse_spec(asym), InvalidConfig);
}

TEST_CASE("model block on its own") {
    const auto c = parse_model_config(R"(scenario: ChasingOnly
consumers: 1
resources: [{kind: abiotic, rate: 0.3, K0: 7}]
a: 0.1
d: 0.1
k: 0.1
w: 0.1
D: [0.01]
)");
    CHECK(c.resources[0].kind == ResourceKind::Abiotic);
    const auto back = parse_model_config(model_config_to_yaml(c));
    CHECK(back.resources[0].carrying_capacity == 7.0);
    CHECK(back.D == c.D);
}

TEST_CASE("every preset validates and survives a YAML round trip") {
    const auto presets = list_presets();
    CHECK(presets.size() > 60);
    for (const auto& p : presets) {
        CAPTURE(p.name);
        const auto s = make_preset(p.name);
        CHECK(s.name == p.name);
        CHECK(s.engine == p.engine);
        CHECK_NOTHROW(validate(s));
        const auto back = parse_spec(spec_to_yaml(s));
        CHECK(back.engine == s.engine);
        CHECK(back.config.D == s.config.D);
        CHECK(back.config.a == s.config.a);
        CHECK(back.run.t_end == s.run.t_end);
        CHECK(back.scan.has_value() == s.scan.has_value());
        CHECK(back.ibm.has_value() == s.ibm.has_value());
    }
    CHECK_THROWS_AS(make_preset("fig99"), InvalidConfig);
}
