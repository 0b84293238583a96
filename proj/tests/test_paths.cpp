#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "loclen/error.hpp"
#include "loclen/oracles.hpp"
#include "loclen/parallel.hpp"
#include "loclen/paths.hpp"

#include <cmath>
#include <sstream>
#include <vector>

using namespace loclen;
using namespace loclen::paths;

namespace {

std::vector<double> values_at(std::size_t count, std::size_t index,
                              const std::function<PathSample(Seed)>& sampler, std::uint64_t stream) {
    std::vector<double> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(sampler(Seed{stream, i}).values[index]);
    return out;
}

}  // namespace

TEST_CASE("Brownian bridge pins both ends and has covariance s(L-u)/L") {
    const double L = 2.0;
    const std::size_t n = 21;  // step 0.1
    parallel::Welford w(3);
    for (std::uint64_t i = 0; i < 40000; ++i) {
        const PathSample p = sample_brownian_bridge(L, n, Seed{11, i});
        REQUIRE(p.values.front() == 0.0);
        REQUIRE(p.values.back() == 0.0);
        const double a = p.values[5], b = p.values[15];  // s = 0.5, u = 1.5
        w.add({a * a, b * b, a * b});
    }
    CHECK(std::abs(w.mean[0] - 0.5 * 1.5 / L) < 4.0 * w.std_error(0));
    CHECK(std::abs(w.mean[1] - 1.5 * 0.5 / L) < 4.0 * w.std_error(1));
    CHECK(std::abs(w.mean[2] - 0.5 * 0.5 / L) < 4.0 * w.std_error(2));
}

TEST_CASE("Brownian motion has variance t") {
    parallel::Welford w(1);
    for (std::uint64_t i = 0; i < 40000; ++i) {
        const double v = sample_brownian_motion(3.0, 7, Seed{12, i}).values.back();
        w.add({v * v});
    }
    CHECK(std::abs(w.mean[0] - 3.0) < 4.0 * w.std_error(0));
}

TEST_CASE("Bessel-3 marginal is a scaled chi-3") {
    const double T = 2.0;
    auto s = values_at(4000, 8, [&](Seed sd) { return sample_bessel3(T, 9, sd); }, 13);
    const auto ks = oracles::ks_one_sample(s, [&](double u) { return oracles::chi3_cdf(u, std::sqrt(T)); });
    CHECK(ks.p_value > 1e-3);
}

TEST_CASE("Bessel-3 bridge at y = 1 of L = 2 is half a Bessel-3 at time 2") {
    auto s = values_at(4000, 5, [](Seed sd) { return sample_bessel3_bridge(2.0, 11, sd); }, 14);
    const auto ks = oracles::ks_one_sample(s, [](double u) { return oracles::chi3_cdf(u, 0.5 * std::sqrt(2.0)); });
    CHECK(ks.p_value > 1e-3);
}

TEST_CASE("three-dimensional bridge modulus has the Bessel-3 bridge law") {
    auto a = values_at(4000, 5, [](Seed sd) { return sample_bridge_modulus_3d(2.0, 11, sd); }, 15);
    const auto ks = oracles::ks_one_sample(a, [](double u) { return oracles::chi3_cdf(u, std::sqrt(0.5)); });
    CHECK(ks.p_value > 1e-3);
    auto b = values_at(4000, 5, [](Seed sd) { return sample_bessel3_bridge(2.0, 11, sd); }, 16);
    CHECK(oracles::ks_two_sample(a, b).p_value > 1e-3);
}

TEST_CASE("Vervaat transform of a bridge is an excursion") {
    const std::size_t n = 4001;
    auto exc = values_at(
        3000, n / 2, [&](Seed sd) { return vervaat_recenter(sample_brownian_bridge(1.0, n, sd)); }, 17);
    for (double v : exc) REQUIRE(v >= 0.0);
    const auto ks = oracles::ks_one_sample(exc, [](double u) { return oracles::chi3_cdf(u, 0.5); });
    CHECK(ks.p_value > 1e-3);
    auto mod = values_at(3000, n / 2, [&](Seed sd) { return sample_bridge_modulus_3d(1.0, n, sd); }, 18);
    CHECK(oracles::ks_two_sample(exc, mod).p_value > 1e-3);
}

TEST_CASE("Vervaat output vanishes at both ends and is periodic in the input") {
    const PathSample b = sample_brownian_bridge(4.0, 401, Seed{19, 0});
    const PathSample e = vervaat_recenter(b);
    CHECK(e.values.front() == 0.0);
    CHECK(e.values.back() == 0.0);
    CHECK(e.kind == PathKind::Excursion);
    const ArgMax m = argmax_of_path(b);
    CHECK(e.values[1] == doctest::Approx(m.value - b.values[(m.index + 1) % 400]));
}

TEST_CASE("argmax takes the first maximizer") {
    PathSample p;
    p.origin = -1.0;
    p.step = 0.5;
    p.values = {0.0, 2.0, 1.0, 2.0, -3.0};
    const ArgMax m = argmax_of_path(p);
    CHECK(m.index == 1);
    CHECK(m.location == -0.5);
    CHECK(m.value == 2.0);
}

TEST_CASE("samplers are pure functions of the seed") {
    const auto a = sample_bessel3_bridge(8.0, 801, Seed{20, 3});
    const auto b = sample_bessel3_bridge(8.0, 801, Seed{20, 3});
    const auto c = sample_bessel3_bridge(8.0, 801, Seed{20, 4});
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
    CHECK(Seed{20, 3}.child(0) != Seed{20, 4}.child(0));
    CHECK(Seed{20, 3}.child(1) != Seed{20, 3}.child(2));
}

TEST_CASE("csv output") {
    PathSample p;
    p.origin = 0.0;
    p.step = 0.25;
    p.values = {0.0, 0.1};
    std::ostringstream os;
    write_csv(p, os);
    CHECK(os.str() == "x,value\n0,0\n0.25,0.10000000000000001\n");
}

TEST_CASE("argument validation") {
    CHECK_THROWS_AS(sample_brownian_bridge(0.0, 10, Seed{}), InvalidArgument);
    CHECK_THROWS_AS(sample_bessel3(1.0, 1, Seed{}), InvalidArgument);
    CHECK_THROWS_AS(vervaat_recenter(sample_brownian_motion(1.0, 10, Seed{})), InvalidArgument);
}
