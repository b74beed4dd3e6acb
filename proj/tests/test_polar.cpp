#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace polarorder;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

void check_atomwise(const DeltaDistribution& got, const DeltaDistribution& want, double tol) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK_THAT(got.atoms()[i].value, WithinAbs(want.atoms()[i].value, tol));
    CHECK_THAT(got.atoms()[i].weight, WithinAbs(want.atoms()[i].weight, tol));
  }
}

}  // namespace

TEST_CASE("sign sequences parse, index, and round trip", "[polar]") {
  SignSequence s("-+");
  CHECK(s.length() == 2);
  CHECK_FALSE(s.plus_at(0));
  CHECK(s.plus_at(1));
  CHECK(s.str() == "-+");

  CHECK(SignSequence("--").index() == 1);
  CHECK(SignSequence("-+").index() == 2);
  CHECK(SignSequence("+-").index() == 3);
  CHECK(SignSequence("++").index() == 4);
  CHECK(SignSequence("").index() == 1);

  CHECK(SignSequence("−+").str() == "-+");  // U+2212 minus accepted

  for (std::uint64_t i = 1; i <= 8; ++i) {
    CHECK(SignSequence::from_index(i, 3).index() == i);
  }
  CHECK(SignSequence::from_index(1, 0).str().empty());
  CHECK_THROWS_AS(SignSequence("+a-"), std::invalid_argument);
  CHECK_THROWS_AS(SignSequence::from_index(0, 2), std::invalid_argument);
  CHECK_THROWS_AS(SignSequence::from_index(5, 2), std::invalid_argument);
}

TEST_CASE("channel-level transforms match the erasure closed forms", "[polar]") {
  for (double eps : {0.2, 0.5, 0.8}) {
    Channel w = make_bec(eps);
    check_atomwise(delta_distribution(channel_minus(w)),
                   delta_distribution(make_bec(2.0 * eps - eps * eps)), 1e-12);
    check_atomwise(delta_distribution(channel_plus(w)), delta_distribution(make_bec(eps * eps)),
                   1e-12);
  }

  Channel identity = make_bsc(0.0);
  check_atomwise(delta_distribution(channel_minus(identity)), delta_distribution(identity), 1e-15);

  CHECK(channel_minus(make_bec(0.5)).output_count() == 9);
  CHECK(channel_plus(make_bec(0.5)).output_count() == 18);
  CHECK_THROWS_WITH(channel_minus(make_bec(0.5), 8), ContainsSubstring("cap"));
  CHECK_THROWS_WITH(channel_plus(make_bec(0.5), 17), ContainsSubstring("cap"));
}

TEST_CASE("parameter-level transforms agree with the channel-level ones", "[polar]") {
  std::mt19937_64 rng(3001);
  std::vector<Channel> channels = {make_bsc(0.25), make_bec(0.5), make_z(0.5)};
  for (int i = 0; i < 20; ++i) channels.push_back(testsupport::random_channel(rng, 4, 4));
  for (const Channel& w : channels) {
    auto d = delta_distribution(w);
    check_atomwise(minus_transform(d), delta_distribution(channel_minus(w)), 1e-12);
    check_atomwise(plus_transform(d), delta_distribution(channel_plus(w)), 1e-12);
  }
}

TEST_CASE("transform fixed points and closed forms", "[polar]") {
  auto one = DeltaDistribution::point_mass(1.0);
  CHECK(minus_transform(one) == one);
  CHECK(plus_transform(one) == one);  // the singular branch carries no mass

  auto bec = delta_distribution(make_bec(0.5));
  check_atomwise(minus_transform(bec), delta_distribution(make_bec(0.75)), 1e-15);
  check_atomwise(plus_transform(bec), delta_distribution(make_bec(0.25)), 1e-15);
}

TEST_CASE("transform moment laws hold on random distributions", "[polar]") {
  std::mt19937_64 rng(3002);
  Functional cap = Functional::capacity();
  for (int i = 0; i < 50; ++i) {
    auto d = testsupport::random_delta(rng, 2, 6);
    auto dm = minus_transform(d);
    auto dp = plus_transform(d);
    double m = d.mean();
    CHECK_THAT(dm.mean(), WithinAbs(m * m, 1e-9));
    CHECK_THAT(dp.mean(), WithinAbs(m, 1e-9));

    double c = expectation_phi(d, cap);
    CHECK_THAT(expectation_phi(dm, cap) + expectation_phi(dp, cap), WithinAbs(2.0 * c, 1e-9));

    double b = b_distribution(d).mean();
    CHECK_THAT(b_distribution(dp).mean(), WithinAbs(b * b, 1e-9));
  }
}

TEST_CASE("synthesis folds transforms left to right", "[polar]") {
  auto bec = delta_distribution(make_bec(0.5));
  CHECK(synthesize(bec, SignSequence(""), SynthesisOptions::exact_mode()) == bec);

  check_atomwise(synthesize(bec, SignSequence("++"), SynthesisOptions::exact_mode()),
                 delta_distribution(make_bec(0.0625)), 1e-15);
  check_atomwise(synthesize(bec, SignSequence("--"), SynthesisOptions::exact_mode()),
                 delta_distribution(make_bec(0.9375)), 1e-15);

  for (int i = 0; i < 10; ++i) {
    double eps = 0.05 + 0.9 * (i / 10.0);
    SignSequence seq(i % 2 ? "-+-" : "+--+");
    auto got = synthesize(delta_distribution(make_bec(eps)), seq, SynthesisOptions::exact_mode());
    double want = testsupport::bec_eps_for_sequence(eps, seq);
    check_atomwise(got, delta_distribution(make_bec(want)), 1e-12);
  }
}

TEST_CASE("budgeted synthesis bounds the support", "[polar]") {
  SynthesisOptions opts;
  opts.budget = 8;
  auto d = synthesize(delta_distribution(make_bsc(0.11)), SignSequence("+-+-+"), opts);
  CHECK(d.size() <= 8);

  SynthesisOptions tiny;
  tiny.budget = 1;
  auto collapsed = synthesize(delta_distribution(make_bsc(0.11)), SignSequence("+"), tiny);
  CHECK(collapsed.size() == 1);

  SynthesisOptions bad;
  bad.budget = 0;
  CHECK_THROWS_AS(synthesize(d, SignSequence("+"), bad), std::invalid_argument);
}

TEST_CASE("exact synthesis reports support overflow", "[polar]") {
  SynthesisOptions opts = SynthesisOptions::exact_mode();
  opts.atom_cap = 64;
  CHECK_THROWS_WITH(synthesize(delta_distribution(make_z(0.37)), SignSequence("++++"), opts),
                    ContainsSubstring("atoms") && ContainsSubstring("64"));
}

TEST_CASE("plus composition of a functional", "[polar]") {
  Functional p2 = Functional::power(2.0);
  for (double d : {-0.9, -0.4, 0.0, 0.3, 0.7, 1.0}) {
    CHECK_THAT(f_plus_compose(p2, d, d), WithinAbs(2.0 * d * d / (1.0 + d * d), 1e-15));
  }
  for (const Functional& phi : built_in_functionals()) {
    for (double d : {-0.8, -0.1, 0.5, 0.95}) {
      CHECK_THAT(f_plus_compose(phi, d, 0.0), WithinAbs(phi.symmetric(d), 1e-15));
    }
  }

  CHECK(f_plus_compose(p2, 1.0, -1.0) == 1.0);  // only one branch has mass
  CHECK(f_plus_compose(p2, 1.0, 1.0) == 1.0);
  CHECK_THROWS_AS(f_plus_compose(p2, 1.5, 0.0), std::domain_error);

  std::mt19937_64 rng(3004);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    double d1 = u(rng), d2 = u(rng);
    CHECK_THAT(f_plus_compose(p2, d1, d2), WithinAbs(f_plus_compose(p2, -d1, d2), 1e-12));
  }
}

TEST_CASE("plus composition averages to the plus-transform expectation", "[polar]") {
  std::mt19937_64 rng(3005);
  for (int i = 0; i < 20; ++i) {
    auto d = testsupport::random_delta(rng, 2, 5);
    for (const Functional& phi : built_in_functionals()) {
      double direct = expectation_phi(plus_transform(d), phi);
      double composed = 0.0;
      for (const Atom& a : d.atoms()) {
        for (const Atom& b : d.atoms()) {
          composed += a.weight * b.weight * f_plus_compose(phi, a.value, b.value);
        }
      }
      CHECK_THAT(direct, WithinAbs(composed, 1e-12));
    }
  }
}
