#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "kapsm/apsm.hpp"
#include "test_util.hpp"

using namespace kapsm;

namespace {
Hyperslab slab(Eigen::VectorXd x, double y, double eps) { return {std::move(x), y, eps}; }

double eval_oracle(const Dictionary& d, const FunctionEstimate& f, const Eigen::VectorXd& x) {
    double acc = 0.0;
    for (std::size_t b = 0; b < d.size(); ++b)
        acc += f.coeffs[b] * kernel_eval(d.kernel(), d.atoms()[b], x);
    return acc;
}
}  // namespace

TEST_CASE("beta coefficient three-case arithmetic") {
    Eigen::VectorXd x(1);
    x << 1.0;
    CHECK(beta_coefficient(0.0, slab(x, 1.0, 0.001), 2.0) == doctest::Approx(0.4995).epsilon(1e-12));
    CHECK(beta_coefficient(1.0, slab(x, 1.0005, 0.001), 2.0) == 0.0);
    CHECK(beta_coefficient(1.0, slab(x, 0.0, 0.5), 1.0) == doctest::Approx(-0.5).epsilon(1e-12));
    // exact boundary counts as inside
    CHECK(beta_coefficient(0.0, slab(x, 0.001, 0.001), 2.0) == 0.0);
    CHECK_THROWS_AS(beta_coefficient(0.0, slab(x, 1.0, 0.0), 0.0), std::domain_error);
    CHECK_THROWS_AS(beta_coefficient(0.0, slab(x, 1.0, 0.0), -1.0), std::domain_error);
}

TEST_CASE("config validation") {
    ApsmConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.mu = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.mu = 2.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = ApsmConfig{};
    cfg.q = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = ApsmConfig{};
    cfg.eps = -1e-9;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("q=1 always reports extrapolation factor 1") {
    std::mt19937_64 eng(11);
    ApsmConfig cfg;
    cfg.q = 1;
    cfg.mu = 0.8;
    cfg.kernel = KernelSpec::gaussian(0.6);
    cfg.alpha = 0.1;
    ComplexApsmFilter f(cfg, 3);
    for (int n = 0; n < 60; ++n) {
        auto x = testutil::random_vec(eng, 3, 1.0);
        auto rep = f.step(x, {x.sum(), -x[0]});
        CHECK(rep.m_real == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(rep.m_imag == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("single projection lands exactly on the slab boundary") {
    std::mt19937_64 eng(5);
    for (const auto& spec : {KernelSpec::linear(), KernelSpec::gaussian(0.5),
                             KernelSpec::hybrid(0.1, 0.9, 0.225)}) {
        ApsmConfig cfg;
        cfg.kernel = spec;
        cfg.q = 1;
        cfg.mu = 1.0;
        cfg.eps = 0.05;
        cfg.alpha = 0.0;  // exact updates, no folding
        ComplexApsmFilter f(cfg, 4);
        auto x = testutil::random_vec(eng, 4, 1.0);
        f.step(x, {3.0, 2.0});
        const auto pred = f.predict(x);
        CHECK(std::abs(pred.real() - 3.0) == doctest::Approx(0.05).epsilon(1e-9));
        CHECK(std::abs(pred.imag() - 2.0) == doctest::Approx(0.05).epsilon(1e-9));
    }
}

TEST_CASE("eps=0, mu=1, q=1 interpolates the sample") {
    std::mt19937_64 eng(17);
    ApsmConfig cfg;
    cfg.kernel = KernelSpec::gaussian(0.8);
    cfg.q = 1;
    cfg.mu = 1.0;
    cfg.eps = 0.0;
    cfg.alpha = 0.0;
    ComplexApsmFilter f(cfg, 3);
    auto x = testutil::random_vec(eng, 3, 1.0);
    f.step(x, {-1.25, 0.75});
    const auto pred = f.predict(x);
    CHECK(pred.real() == doctest::Approx(-1.25).epsilon(1e-9));
    CHECK(pred.imag() == doctest::Approx(0.75).epsilon(1e-9));
}

TEST_CASE("satisfied slabs leave the estimate untouched") {
    std::mt19937_64 eng(23);
    ApsmConfig cfg;
    cfg.kernel = KernelSpec::gaussian(0.5);
    cfg.q = 3;
    cfg.eps = 0.001;
    ComplexApsmFilter f(cfg, 2);
    for (int n = 0; n < 10; ++n) {
        auto x = testutil::random_vec(eng, 2, 1.0);
        auto rep = f.step(x, {0.0005, -0.0003});  // inside the slab of the zero estimate
        CHECK(rep.m_real == 1.0);
        CHECK(rep.m_imag == 1.0);
        CHECK(f.predict(x) == std::complex<double>{0.0, 0.0});
    }
    for (double c : f.estimate_re().coeffs) CHECK(c == 0.0);
    for (double c : f.estimate_im().coeffs) CHECK(c == 0.0);
    CHECK(f.dictionary().size() > 0);  // admission is novelty-driven, not error-driven
}

TEST_CASE("extrapolation factor is never below 1") {
    std::mt19937_64 eng(31);
    ApsmConfig cfg;
    cfg.kernel = KernelSpec::gaussian(0.4);
    cfg.q = 8;
    cfg.mu = 0.5;
    cfg.eps = 0.01;
    cfg.alpha = 0.05;
    ComplexApsmFilter f(cfg, 3);
    double max_m = 0.0;
    for (int n = 0; n < 300; ++n) {
        auto x = testutil::random_vec(eng, 3, 1.2);
        auto rep = f.step(x, {std::sin(x.sum()) + 0.3 * x[1], x.prod()});
        CHECK(rep.m_real >= 1.0 - 1e-12);
        CHECK(rep.m_imag >= 1.0 - 1e-12);
        max_m = std::max({max_m, rep.m_real, rep.m_imag});
    }
    CHECK(max_m > 1.0 + 1e-9);  // parallel projections genuinely extrapolate
}

TEST_CASE("Fejér monotonicity toward a realizable target") {
    // Targets come from a fixed g in the span of the first atoms; with eps>0
    // g lies in every hyperslab, so distance to g must not increase.
    std::mt19937_64 eng(41);
    ApsmConfig cfg;
    cfg.kernel = KernelSpec::gaussian(0.7);
    cfg.q = 4;
    cfg.mu = 0.7;
    cfg.eps = 0.01;
    cfg.alpha = 0.0;  // admit everything: atoms equal the stream prefix
    ComplexApsmFilter f(cfg, 3);

    const int n_anchor = 5, n_steps = 800;
    std::vector<Eigen::VectorXd> stream;
    for (int n = 0; n < n_steps; ++n) stream.push_back(testutil::random_vec(eng, 3, 1.0));
    Eigen::VectorXd g_re(n_anchor), g_im(n_anchor);
    g_re << 0.8, -0.5, 0.3, 0.1, -0.2;
    g_im << -0.4, 0.6, 0.2, -0.1, 0.05;

    auto target = [&](const Eigen::VectorXd& x) {
        double re = 0.0, im = 0.0;
        for (int a = 0; a < n_anchor; ++a) {
            const double k = kernel_eval(cfg.kernel, stream[(std::size_t)a], x);
            re += g_re[a] * k;
            im += g_im[a] * k;
        }
        return std::complex<double>{re, im};
    };
    auto dist_sq = [&](const FunctionEstimate& est, const Eigen::VectorXd& g) {
        const auto B = (Eigen::Index)f.dictionary().size();
        Eigen::VectorXd c = Eigen::VectorXd::Zero(B);
        for (Eigen::Index b = 0; b < B; ++b) c[b] = est.coeffs[(std::size_t)b];
        c.head(n_anchor) -= g;
        return (double)(c.transpose() * f.dictionary().gram() * c);
    };

    double prev_re = -1.0, prev_im = -1.0;
    for (int n = 0; n < n_steps; ++n) {
        f.step(stream[(std::size_t)n], target(stream[(std::size_t)n]));
        if (n + 1 < n_anchor) continue;  // g enters the span once its atoms are in
        const double d_re = dist_sq(f.estimate_re(), g_re);
        const double d_im = dist_sq(f.estimate_im(), g_im);
        if (prev_re >= 0.0) {
            CHECK(d_re <= prev_re + 1e-9);
            CHECK(d_im <= prev_im + 1e-9);
        }
        prev_re = d_re;
        prev_im = d_im;
    }
    CHECK(prev_re < 0.05);  // and it actually approaches g
}

TEST_CASE("parallel combination is order invariant") {
    std::mt19937_64 eng(53);
    const KernelSpec spec = KernelSpec::gaussian(0.5);
    for (int trial = 0; trial < 10; ++trial) {
        Dictionary d(spec, 0.0);
        std::vector<Eigen::VectorXd> xs;
        for (int i = 0; i < 6; ++i) {
            xs.push_back(testutil::random_vec(eng, 3, 1.0));
            d.admit_or_project(xs.back());
        }
        FunctionEstimate f0;
        d.attach(f0);
        for (auto& c : f0.coeffs) c = std::normal_distribution<>{}(eng);

        const int q = 4;
        std::vector<Hyperslab> slabs;
        std::vector<double> weights(q, 1.0 / q);
        std::vector<int> atom_idx;
        std::vector<Eigen::VectorXd> folds(q);
        for (int j = 0; j < q; ++j) {
            slabs.push_back(slab(xs[(std::size_t)j], std::normal_distribution<>{}(eng), 0.01));
            atom_idx.push_back(j);
        }
        Eigen::MatrixXd gram(q, q);
        for (int i = 0; i < q; ++i)
            for (int j = 0; j < q; ++j) gram(i, j) = kernel_eval(spec, slabs[(std::size_t)i].x, slabs[(std::size_t)j].x);

        FunctionEstimate fa = f0, fb = f0;
        apply_projection_batch(d, fa, slabs, weights, atom_idx, folds, gram, 0.9);

        const std::vector<int> perm{2, 0, 3, 1};
        std::vector<Hyperslab> slabs_p;
        std::vector<int> idx_p;
        Eigen::MatrixXd gram_p(q, q);
        for (int i = 0; i < q; ++i) {
            slabs_p.push_back(slabs[(std::size_t)perm[(std::size_t)i]]);
            idx_p.push_back(atom_idx[(std::size_t)perm[(std::size_t)i]]);
            for (int j = 0; j < q; ++j)
                gram_p(i, j) = gram(perm[(std::size_t)i], perm[(std::size_t)j]);
        }
        apply_projection_batch(d, fb, slabs_p, weights, idx_p, folds, gram_p, 0.9);
        for (int b = 0; b < 6; ++b)
            CHECK(fa.coeffs[(std::size_t)b] == doctest::Approx(fb.coeffs[(std::size_t)b]).epsilon(1e-10));
    }
}

TEST_CASE("conjugate targets give conjugate predictions") {
    std::mt19937_64 eng(67);
    ApsmConfig cfg;
    cfg.kernel = KernelSpec::hybrid(0.1, 0.9, 0.225);
    cfg.q = 5;
    cfg.mu = 0.6;
    cfg.alpha = 0.1;
    ComplexApsmFilter f1(cfg, 3), f2(cfg, 3);
    std::vector<Eigen::VectorXd> xs;
    for (int n = 0; n < 120; ++n) {
        auto x = testutil::random_vec(eng, 3, 1.0);
        const std::complex<double> y{std::cos(x.sum()), 0.4 * x[2]};
        f1.step(x, y);
        f2.step(x, std::conj(y));
        xs.push_back(std::move(x));
    }
    for (const auto& x : xs) {
        const auto p1 = f1.predict(x), p2 = f2.predict(x);
        CHECK(p2.real() == doctest::Approx(p1.real()).epsilon(1e-9));
        CHECK(p2.imag() == doctest::Approx(-p1.imag()).epsilon(1e-9));
    }
}

TEST_CASE("prediction matches the representer sum oracle") {
    std::mt19937_64 eng(71);
    ApsmConfig cfg;
    cfg.kernel = KernelSpec::gaussian(0.9);
    cfg.q = 3;
    cfg.mu = 0.5;
    cfg.alpha = 0.05;
    ComplexApsmFilter f(cfg, 2);
    CHECK(f.predict(testutil::random_vec(eng, 2, 1.0)) == std::complex<double>{0.0, 0.0});
    for (int n = 0; n < 80; ++n) {
        auto x = testutil::random_vec(eng, 2, 1.0);
        f.step(x, {x[0] * x[1], x[0] - x[1]});
    }
    for (int t = 0; t < 20; ++t) {
        auto x = testutil::random_vec(eng, 2, 1.0);
        const auto pred = f.predict(x);
        CHECK(pred.real() ==
              doctest::Approx(eval_oracle(f.dictionary(), f.estimate_re(), x)).epsilon(1e-10));
        CHECK(pred.imag() ==
              doctest::Approx(eval_oracle(f.dictionary(), f.estimate_im(), x)).epsilon(1e-10));
    }
}

TEST_CASE("non-finite samples are skipped without state change") {
    std::mt19937_64 eng(83);
    ApsmConfig cfg;
    cfg.kernel = KernelSpec::gaussian(0.5);
    ComplexApsmFilter f(cfg, 2);
    auto x = testutil::random_vec(eng, 2, 1.0);
    f.step(x, {1.0, -1.0});
    const auto coeffs_before = f.estimate_re().coeffs;
    const auto dict_before = f.dictionary().size();

    Eigen::VectorXd bad = x;
    bad[0] = std::numeric_limits<double>::quiet_NaN();
    auto rep1 = f.step(bad, {1.0, 1.0});
    CHECK(rep1.skipped);
    auto rep2 = f.step(x, {std::numeric_limits<double>::infinity(), 0.0});
    CHECK(rep2.skipped);
    CHECK(f.skipped_samples() == 2);
    CHECK(f.dictionary().size() == dict_before);
    CHECK(f.estimate_re().coeffs == coeffs_before);

    Eigen::VectorXd wrong_dim(3);
    wrong_dim << 1, 2, 3;
    CHECK_THROWS_AS(f.step(wrong_dim, {0.0, 0.0}), std::invalid_argument);
}
