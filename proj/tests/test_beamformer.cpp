// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "dfrc/beamformer.hpp"
#include "dfrc/rng.hpp"

using namespace dfrc;

namespace {

HybridBeamformer full_example(std::uint64_t seed) {
  Rng rng(seed);
  HybridBeamformer b;
  b.structure = Structure::fully_connected;
  b.f_rf = rng.unit_phase(8, 4);
  b.f_bb = rng.complex_normal(4, 2);
  b.f_bb *= std::sqrt(2.0) / (b.f_rf * b.f_bb).norm();
  return b;
}

HybridBeamformer partial_example(std::uint64_t seed) {
  Rng rng(seed);
  HybridBeamformer b;
  b.structure = Structure::partially_connected;
  b.f_rf = CMatrix::Zero(8, 4);
  for (Index j = 0; j < 4; ++j) b.f_rf.block(2 * j, j, 2, 1) = rng.unit_phase(2, 1);
  b.f_bb = rng.complex_normal(4, 2);
  b.f_bb *= 1.0 / b.f_bb.norm();  // N_s N_RF / N_t = 1
  return b;
}

}  // namespace

TEST_CASE("feasible beamformers validate cleanly") {
  CHECK(validate(full_example(1)).empty());
  CHECK(validate(partial_example(2)).empty());
  const HybridBeamformer b = full_example(3);
  CHECK((effective_precoder(b) - b.f_rf * b.f_bb).norm() == 0.0);
}

TEST_CASE("validate reports each kind of violation") {
  HybridBeamformer b = full_example(4);
  b.f_rf(2, 1) *= 1.5;
  b.f_bb *= std::sqrt(2.0) / (b.f_rf * b.f_bb).norm();
  auto v = validate(b);
  REQUIRE(v.size() == 1);
  CHECK(v[0].constraint == "unit_modulus");
  CHECK(v[0].value == doctest::Approx(1.5));
  CHECK(v[0].excess == doctest::Approx(0.5));
  CHECK(v[0].detail.find("(2,1)") != std::string::npos);

  HybridBeamformer p = partial_example(5);
  p.f_rf(7, 0) = 0.25;
  v = validate(p);
  REQUIRE(v.size() == 1);
  CHECK(v[0].constraint == "off_block_zero");
  CHECK(v[0].value == doctest::Approx(0.25));

  p = partial_example(5);
  p.f_bb *= 2.0;
  v = validate(p);
  REQUIRE(v.size() == 1);
  CHECK(v[0].constraint == "power");
  CHECK(v[0].value == doctest::Approx(4.0));

  HybridBeamformer f = full_example(6);
  f.f_bb *= 1.0 + 1e-9;  // within the power tolerance
  CHECK(validate(f).empty());

  HybridBeamformer s = full_example(7);
  s.f_bb = CMatrix::Zero(3, 2);
  v = validate(s);
  REQUIRE(v.size() == 1);
  CHECK(v[0].constraint == "shape");

  HybridBeamformer nd = partial_example(8);
  nd.f_rf = CMatrix::Ones(9, 4);
  CHECK(validate(nd).at(0).constraint == "shape");
}

TEST_CASE("effective_precoder refuses infeasible inputs") {
  HybridBeamformer b = full_example(9);
  b.f_rf(0, 0) = 0.0;
  CHECK_THROWS_AS(effective_precoder(b), NumericalError);
  try {
    effective_precoder(b);
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("unit_modulus") != std::string::npos);
  }
}

TEST_CASE("JSON round trip is exact") {
  for (const HybridBeamformer& b : {full_example(10), partial_example(11)}) {
    const HybridBeamformer back = beamformer_from_json(to_json(b));
    CHECK(back.structure == b.structure);
    CHECK((back.f_rf - b.f_rf).norm() == 0.0);
    CHECK((back.f_bb - b.f_bb).norm() == 0.0);
    CHECK(to_json(back) == to_json(b));
  }
}

TEST_CASE("malformed beamformer JSON raises IoError") {
  const std::string good = to_json(full_example(12));
  CHECK_THROWS_AS(beamformer_from_json("{not json"), IoError);
  CHECK_THROWS_AS(beamformer_from_json("{}"), IoError);
  std::string bad = good;
  bad.replace(bad.find("\"n_rf\": 4"), 9, "\"n_rf\": 3");
  CHECK_THROWS_AS(beamformer_from_json(bad), IoError);
  bad = good;
  bad.replace(bad.find("\"full\""), 6, "\"mesh\"");
  CHECK_THROWS_AS(beamformer_from_json(bad), IoError);
  CHECK_THROWS_AS(beamformer_from_json(R"({"structure":"full","n_tx":1,"n_rf":1,"n_streams":1,)"
                                       R"("f_rf":[[[1,0]]],"f_bb":[["x",0]]})"),
                  IoError);
}

TEST_CASE("per-chain phase gauge leaves the effective precoder unchanged") {
  HybridBeamformer b = full_example(13);
  const CMatrix before = effective_precoder(b);
  Rng rng(14);
  for (Index j = 0; j < b.n_rf(); ++j) {
    const cdouble g = rng.unit_phase();
    b.f_rf.col(j) *= g;
    b.f_bb.row(j) *= std::conj(g);
  }
  CHECK(validate(b).empty());
  CHECK((effective_precoder(b) - before).norm() <= 1e-13);
}
