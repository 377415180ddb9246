#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <random>

#include "pillowkit/errors.hpp"
#include "pillowkit/io/json.hpp"

using namespace pillowkit;
using namespace pillowkit::io;

TEST_CASE("floats are written with 17 significant digits") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1.0");
  CHECK(format_double(-2.5e-300) == "-2.5e-300");
  CHECK(format_double(1.0 / 3.0) == "0.33333333333333331");
  CHECK_THROWS_AS(format_double(std::nan("")), std::domain_error);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
  }
  const json j = {{"a", 1}, {"b", {0.5, 2.0}}, {"c", "text"}, {"d", json::array()}, {"e", nullptr}};
  const std::string text = dump(j);
  CHECK(text.find("\"b\": [0.5, 2.0]") != std::string::npos);
  CHECK(parse(text) == j);
  CHECK(dump(j, 0) == R"({"a":1,"b":[0.5,2.0],"c":"text","d":[],"e":null})");
}

TEST_CASE("strict objects") {
  const json j = {{"x", 1.5}, {"n", 3}, {"extra", true}};
  ObjectReader r(j, "cfg");
  CHECK(r.number("x") == 1.5);
  CHECK(r.integer("n") == 3);
  CHECK(r.number("missing", 7.0) == 7.0);
  CHECK_THROWS_AS(r.finish(), SchemaError);
  r.allow({"extra"});
  CHECK_NOTHROW(r.finish());
  ObjectReader s(j, "cfg");
  CHECK_THROWS_AS(s.integer("x"), SchemaError);
  CHECK_THROWS_AS(s.string("n"), SchemaError);
  CHECK_THROWS_AS(s.at("nope"), SchemaError);
  CHECK_THROWS_AS(ObjectReader(json::array(), "cfg"), SchemaError);
  CHECK_THROWS_AS(parse("{not json"), SchemaError);
}

TEST_CASE("field specs") {
  const auto f = time_field_from_json(parse(R"({"type": "named", "name": "sin_y_sin_x"})"));
  const torus::Vec2 p{0.3, 1.1};
  const auto v = f(0.0, p);
  CHECK(v.x == doctest::Approx(std::sin(1.1)).epsilon(1e-15));
  CHECK(v.y == doctest::Approx(std::sin(0.3)).epsilon(1e-15));
  CHECK(f.autonomous);

  const auto b = time_field_from_json(parse(R"({"type": "named", "name": "blend_example", "time_samples": 5})"));
  CHECK(b.time_samples == 5);
  const auto w = b(0.25, p);
  CHECK(w.x == doctest::Approx(0.75 * std::sin(1.1)));
  CHECK(w.y == doctest::Approx(0.25 * std::sin(0.3)));

  const auto fo = time_field_from_json(parse(
      R"({"type": "fourier", "field": {"terms": [{"k": [1, 1], "u_sin": [1, -1]}], "mean": [0.5, 0]}})"));
  const auto z = fo(0.0, p);
  CHECK(z.x == doctest::Approx(std::sin(1.4) + 0.5));
  CHECK(z.y == doctest::Approx(-std::sin(1.4)));

  // Amplitude along k is a divergence.
  CHECK_THROWS_AS(time_field_from_json(parse(R"({"type": "fourier", "field": {"terms": [{"k": [1, 0], "u_sin": [1, 0]}]}})")),
                  DivergenceTooLarge);
  CHECK_THROWS_AS(time_field_from_json(parse(R"({"type": "named", "name": "nope"})")), SchemaError);
  CHECK_THROWS_AS(time_field_from_json(parse(R"({"type": "named", "name": "sin_y_sin_x", "speed": 2})")), SchemaError);

  // Gridded samples of (sin y, 0).
  json values = json::array();
  const int n = 16;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) values.push_back({std::sin(torus::kTwoPi * k / n), 0.0});
  }
  const auto g = time_field_from_json({{"type", "gridded"}, {"n", n}, {"radius", 2}, {"values", values}});
  CHECK(g(0.0, p).x == doctest::Approx(std::sin(1.1)).epsilon(1e-12));
}

TEST_CASE("program round trip") {
  torus::ProgramBlock a;
  a.maps = {torus::ShearingMap({1, 2}, torus::ShearingProfile({{1, 0.3}, {2, -0.1}}, {{0, 0.05}}))};
  a.step_duration = 0.25;
  torus::ProgramBlock b;
  b.maps = {torus::ShearingMap({0, 1}, torus::ShearingProfile::sine(3, 0.2)),
            torus::ShearingMap({1, 0}, torus::ShearingProfile::sine(1, -0.4))};
  b.repeat = 3;
  b.step_duration = 0.125;
  b.speed = 2.0;
  const torus::ShearingProgram prog({a, b});
  const json j = to_json(prog);
  const auto back = program_from_json(parse(dump(j)));
  CHECK(back.step_count() == prog.step_count());
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, torus::kTwoPi), t(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const torus::Vec2 p{u(rng), u(rng)};
    const double s = t(rng);
    const auto x = prog.eval_lifted(s, p), y = back.eval_lifted(s, p);
    CHECK(x.x == y.x);
    CHECK(x.y == y.y);
  }
  CHECK(dump(to_json(back)) == dump(j));
  json bad = j;
  bad["blocks"][0]["step_duration"] = 0.5;
  CHECK_THROWS_AS(program_from_json(bad), SchemaError);
  bad = j;
  bad["version"] = 2;
  CHECK_THROWS_AS(program_from_json(bad), SchemaError);
}

TEST_CASE("knot and presentation schemas") {
  const auto t = knot_spec_from_json(parse(R"({"type": "torus", "p": 2, "q": 5})"), "knot");
  CHECK(t.id() == "T(2,5)");
  CHECK(knot_spec_from_json(to_json(t), "knot").q == 5);
  CHECK(knot_spec_from_json(parse(R"({"type": "unknot"})"), "knot").kind == knots::KnotSpec::Kind::Unknot);
  CHECK_THROWS_AS(knot_spec_from_json(parse(R"({"type": "torus", "p": 2})"), "knot"), SchemaError);
  CHECK_THROWS_AS(knot_spec_from_json(parse(R"({"type": "unknot", "p": 2})"), "knot"), SchemaError);

  const auto custom = knot_spec_from_json(
      parse(R"({"type": "custom", "name": "tref", "presentation": {"generators": 2, "relators": [[1, 1, -2, -2, -2]]},
                "meridian": [-1, 2, 2], "longitude": [1, 1, 1, -2, -2, 1, -2, -2, 1, -2, -2, 1, -2, -2, 1, -2, -2, 1, -2, -2]})"),
      "knot");
  CHECK(knots::knot_group(custom).meridian == knots::Word{-1, 2, 2});

  const auto g = knots::knot_group(knots::KnotSpec::torus(2, 3));
  const auto p = presentation_from_json(to_json(g.presentation), "p");
  CHECK(p.relators == g.presentation.relators);
  CHECK(p.names == g.presentation.names);
  CHECK_THROWS_AS(presentation_from_json(parse(R"({"generators": 1, "relators": [[2]]})"), "p"), SchemaError);

  knots::RepAssignment r;
  r.images = {knots::SU2::diag(0.1), knots::SU2::exp(0.1, 0.2, 0.3)};
  r.residual = 1e-15;
  const json rj = to_json(r);
  CHECK(rj["images"][0][0].get<double>() == std::cos(0.1));
  CHECK(rj["images"].size() == 2);
}

TEST_CASE("certificate schema") {
  const cert::Certificate c{"trefoil", 5, {cert::ModMatrix::make(1, 1, 0, 1, 5), cert::ModMatrix::make(1, 0, 4, 1, 5)}};
  const json j = to_json(c);
  CHECK(j["p"] == "5");
  CHECK(j["images"][1] == json::array({1, 0, 4, 1}));
  const auto back = certificate_from_json(parse(dump(j)));
  CHECK(back.p == 5);
  CHECK(back.images == c.images);
  CHECK(back.presentation_id == "trefoil");

  json big = j;
  big["p"] = "18446744073709551557";
  CHECK(certificate_from_json(big).p == 18446744073709551557ull);
  for (const char* p : {"5x", "", "-5", "18446744073709551616"}) {
    json bad = j;
    bad["p"] = p;
    CHECK_THROWS_AS(certificate_from_json(bad), SchemaError);
  }
  json bad = j;
  bad["p"] = 5;
  CHECK_THROWS_AS(certificate_from_json(bad), SchemaError);
  bad = j;
  bad["images"][0][0] = -1;
  CHECK_THROWS_AS(certificate_from_json(bad), SchemaError);
  bad = j;
  bad["images"][0] = json::array({1, 2, 3});
  CHECK_THROWS_AS(certificate_from_json(bad), SchemaError);
  bad = j;
  bad["signature"] = "x";
  CHECK_THROWS_AS(certificate_from_json(bad), SchemaError);
}
