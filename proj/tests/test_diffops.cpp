#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "dkgqa/matrix.hpp"
#include "dkgqa/ops.hpp"
#include "dkgqa/reified.hpp"
#include "dkgqa/tape.hpp"
#include "dkgqa/triple_store.hpp"

using namespace dkgqa;

namespace {

TripleStore toy_store() {
    std::istringstream in(
        "NataliePortman\tplayed\tPadme\n"
        "NataliePortman\tplayed\tNinaSayers\n"
        "StarWarsII\tcharacter\tPadme\n"
        "StarWarsII\tcharacter\tAnakin\n"
        "HaydenChristensen\tplayed\tAnakin\n");
    return ingest_triples(in);
}

std::vector<double> random_unit_vector(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = unit(rng);
    return v;
}

}  // namespace

TEST_CASE("softmax basics") {
    SUBCASE("uniform over zeros") {
        auto s = softmax({0.0, 0.0, 0.0, 0.0});
        for (double v : s) CHECK(v == 0.25);
    }
    SUBCASE("large logits do not overflow") {
        auto s = softmax({1000.0, 0.0});
        CHECK(s[0] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(s[1] >= 0.0);
        CHECK(s[1] <= 1e-300);
        CHECK(std::isfinite(s[0]));
    }
    SUBCASE("sums to one, all positive") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> d(-5.0, 5.0);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> z(10);
            for (auto& v : z) v = d(rng);
            auto s = softmax(z);
            double sum = 0.0;
            for (double v : s) {
                CHECK(v > 0.0);
                sum += v;
            }
            CHECK(std::abs(sum - 1.0) <= 1e-12);
        }
    }
    SUBCASE("empty input rejected") { CHECK_THROWS_AS(softmax({}), std::invalid_argument); }
}

TEST_CASE("softmax vjp matches finite differences") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    const double h = 1e-6;
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> z(6), g(6);
        for (auto& v : z) v = d(rng);
        for (auto& v : g) v = d(rng);

        auto s = softmax(z);
        std::vector<double> dz(6, 0.0);
        softmax_vjp(s, g, dz);

        for (std::size_t i = 0; i < z.size(); ++i) {
            auto zp = z, zm = z;
            zp[i] += h;
            zm[i] -= h;
            auto sp = softmax(zp);
            auto sm = softmax(zm);
            double fd = 0.0;
            for (std::size_t j = 0; j < g.size(); ++j) {
                fd += g[j] * (sp[j] - sm[j]) / (2.0 * h);
            }
            CHECK(dz[i] == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("element-wise minimum intersection") {
    const std::vector<double> a{0, 0, 1, 1, 0, 0};
    const std::vector<double> b{0, 0, 1, 0, 1, 0};
    CHECK(intersect_min(a, b) == std::vector<double>{0, 0, 1, 0, 0, 0});

    SUBCASE("commutative and idempotent, zero absorbing") {
        std::mt19937_64 rng(9);
        for (int trial = 0; trial < 1000; ++trial) {
            auto x = random_unit_vector(rng, 16);
            auto y = random_unit_vector(rng, 16);
            CHECK(intersect_min(x, y) == intersect_min(y, x));
            CHECK(intersect_min(x, x) == x);
            CHECK(intersect_min(x, std::vector<double>(16, 0.0)) ==
                  std::vector<double>(16, 0.0));
        }
    }
    SUBCASE("dominates the product on the unit interval") {
        std::mt19937_64 rng(10);
        for (int trial = 0; trial < 1000; ++trial) {
            auto x = random_unit_vector(rng, 16);
            auto y = random_unit_vector(rng, 16);
            auto m = intersect_min(x, y);
            for (std::size_t i = 0; i < m.size(); ++i) CHECK(m[i] >= x[i] * y[i]);
        }
    }
    SUBCASE("size mismatch rejected") {
        CHECK_THROWS_AS(intersect_min({1.0}, {1.0, 2.0}), std::invalid_argument);
    }
}

TEST_CASE("intersection gradient goes to the smaller side, ties split") {
    std::vector<double> da(2, 0.0), db(2, 0.0);
    intersect_min_vjp({1.0, 2.0}, {2.0, 1.0}, {5.0, 7.0}, da, db);
    CHECK(da == std::vector<double>{5.0, 0.0});
    CHECK(db == std::vector<double>{0.0, 7.0});

    std::vector<double> ta(1, 0.0), tb(1, 0.0);
    intersect_min_vjp({3.0}, {3.0}, {4.0}, ta, tb);
    CHECK(ta[0] == 2.0);
    CHECK(tb[0] == 2.0);
}

TEST_CASE("unit clamp") {
    CHECK(clamp_unit({2.0}, 1e-6)[0] == 1.0 - 1e-6);
    CHECK(clamp_unit({0.5}, 1e-6)[0] == 0.5);
    CHECK(clamp_unit({0.0}, 1e-6)[0] == 1e-6);
    CHECK_THROWS_AS(clamp_unit({0.5}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(clamp_unit({0.5}, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(clamp_unit({0.5}, -0.1), std::invalid_argument);

    SUBCASE("gradient is identity strictly inside, zero at and past the edges") {
        const double eps = 1e-3;
        std::vector<double> x{0.5, 0.0, 1.5, eps, 1.0 - eps, 2e-3};
        std::vector<double> g(x.size(), 1.0), dx(x.size(), 0.0);
        clamp_unit_vjp(x, eps, g, dx);
        CHECK(dx == std::vector<double>{1.0, 0.0, 0.0, 0.0, 0.0, 1.0});
    }
}

TEST_CASE("multi-label cross entropy") {
    CHECK(multilabel_loss({1.0, 0.0}, {0.5, 0.5}) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));

    SUBCASE("unclamped predictions are rejected loudly") {
        CHECK_THROWS_WITH_AS(
            multilabel_loss({1.0, 0.0}, {0.5, 1.200000}),
            "multilabel_loss: prediction 1.200000 at index 1 outside (0, 1); clamp was skipped",
            std::invalid_argument);
        CHECK_THROWS_AS(multilabel_loss({1.0}, {0.0}), std::invalid_argument);
        CHECK_THROWS_AS(multilabel_loss({1.0}, {1.0}), std::invalid_argument);
        CHECK_THROWS_AS(multilabel_loss({}, {}), std::invalid_argument);
    }
    SUBCASE("vjp matches finite differences") {
        std::mt19937_64 rng(21);
        std::uniform_real_distribution<double> dp(0.05, 0.95);
        std::bernoulli_distribution dy(0.5);
        const double h = 1e-7;
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<double> y(8), p(8);
            for (auto& v : y) v = dy(rng) ? 1.0 : 0.0;
            for (auto& v : p) v = dp(rng);
            std::vector<double> dpv(8, 0.0);
            multilabel_loss_vjp(y, p, 1.0, dpv);
            for (std::size_t i = 0; i < p.size(); ++i) {
                auto pp = p, pm = p;
                pp[i] += h;
                pm[i] -= h;
                const double fd = (multilabel_loss(y, pp) - multilabel_loss(y, pm)) / (2.0 * h);
                CHECK(dpv[i] == doctest::Approx(fd).epsilon(1e-5));
            }
        }
    }
}

TEST_CASE("tape sequencing contracts") {
    GradTape tape;
    CHECK_THROWS_AS(tape.backward(0), std::logic_error);

    NodeId a = tape.constant({1.0, 2.0});
    CHECK_THROWS_AS(tape.grad(a), std::logic_error);  // before any backward
    tape.backward(a);
    CHECK(tape.grad(a) == std::vector<double>{1.0, 1.0});
    CHECK_THROWS_AS(tape.value(99), std::invalid_argument);
}

TEST_CASE("tape add and concat propagate seeds") {
    GradTape tape;
    NodeId a = tape.constant({1.0, 2.0});
    NodeId b = tape.constant({3.0, 4.0});
    NodeId sum = tape.add(a, b);
    CHECK(tape.value(sum) == std::vector<double>{4.0, 6.0});
    NodeId cat = tape.concat({sum, a});
    CHECK(tape.value(cat) == std::vector<double>{4.0, 6.0, 1.0, 2.0});
    tape.backward(cat, 2.0);
    CHECK(tape.grad(a) == std::vector<double>{4.0, 4.0});  // through sum and directly
    CHECK(tape.grad(b) == std::vector<double>{2.0, 2.0});

    GradTape bad;
    NodeId x = bad.constant({1.0});
    NodeId y = bad.constant({1.0, 2.0});
    CHECK_THROWS_AS(bad.add(x, y), std::invalid_argument);
    CHECK_THROWS_AS(bad.concat({}), std::invalid_argument);
}

TEST_CASE("tape softmax is shift invariant under a uniform seed") {
    GradTape tape;
    NodeId z = tape.constant({0.3, -1.2, 2.0, 0.7});
    NodeId s = tape.softmax(z);
    tape.backward(s);
    for (double g : tape.grad(z)) CHECK(std::abs(g) <= 1e-15);
}

TEST_CASE("tape follow gradient lands only on participating relations") {
    TripleStore store = toy_store();
    ReifiedMatrices m = reify(store);
    GradTape tape;
    std::vector<double> x0(store.n_entities(), 0.0);
    x0[0] = 1.0;  // NataliePortman
    NodeId x = tape.constant(x0);
    NodeId r = tape.constant({0.3, 0.7});
    NodeId out = tape.follow(m, x, r);
    CHECK(tape.value(out) == std::vector<double>{0, 0.3, 0.3, 0, 0, 0});
    tape.backward(out);
    // Only `played` leaves NataliePortman; two triples contribute 1.0 each.
    CHECK(tape.grad(r) == std::vector<double>{2.0, 0.0});
    // dx lands on her subjects only, weighted by the relation mass.
    CHECK(tape.grad(x)[0] == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("tape weighted sum selects and mixes hop states") {
    GradTape tape;
    NodeId w = tape.constant({1.0, 0.0});
    NodeId x1 = tape.constant({0.1, 0.2, 0.3});
    NodeId x2 = tape.constant({9.0, 9.0, 9.0});
    NodeId y = tape.weighted_sum(w, {x1, x2});
    CHECK(tape.value(y) == tape.value(x1));  // weight one on the first state
    tape.backward(y);
    CHECK(tape.grad(x1) == std::vector<double>{1.0, 1.0, 1.0});
    CHECK(tape.grad(x2) == std::vector<double>{0.0, 0.0, 0.0});
    CHECK(tape.grad(w)[0] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(tape.grad(w)[1] == doctest::Approx(27.0).epsilon(1e-12));

    GradTape bad;
    NodeId bw = bad.constant({1.0});
    NodeId bx = bad.constant({1.0});
    CHECK_THROWS_AS(bad.weighted_sum(bw, {}), std::invalid_argument);
    CHECK_THROWS_AS(bad.weighted_sum(bw, {bx, bx}), std::invalid_argument);
}

TEST_CASE("matvec sink accumulates across tapes") {
    Matrix w(2, 3);
    w(0, 0) = 1.0;
    w(1, 2) = 2.0;
    Matrix dw(2, 3);

    auto run_once = [&]() {
        GradTape tape;
        NodeId v = tape.constant({1.0, 2.0, 3.0});
        NodeId out = tape.matvec(w, v, &dw);
        CHECK(tape.value(out) == std::vector<double>{1.0, 6.0});
        tape.backward(out);
    };
    run_once();
    const double after_one = dw(0, 1);
    CHECK(after_one == 2.0);  // g=1 outer v
    run_once();
    CHECK(dw(0, 1) == 2.0 * after_one);
    CHECK(dw(1, 2) == 6.0);

    // Frozen weights: null sink leaves nothing behind but still backprops to v.
    GradTape tape;
    NodeId v = tape.constant({1.0, 2.0, 3.0});
    NodeId out = tape.matvec(w, v, nullptr);
    tape.backward(out);
    CHECK(tape.grad(v) == std::vector<double>{1.0, 0.0, 2.0});
}

TEST_CASE("embedding mean averages rows with multiplicity") {
    Matrix emb(3, 2);
    emb(0, 0) = 1.0;
    emb(1, 0) = 3.0;
    emb(2, 1) = 8.0;
    Matrix demb(3, 2);

    GradTape tape;
    NodeId h = tape.embedding_mean(emb, {0, 1, 1, 2}, &demb);
    CHECK(tape.value(h) == std::vector<double>{(1.0 + 3.0 + 3.0) / 4.0, 2.0});
    tape.backward(h);
    CHECK(demb(0, 0) == doctest::Approx(0.25));
    CHECK(demb(1, 0) == doctest::Approx(0.5));  // listed twice
    CHECK(demb(2, 1) == doctest::Approx(0.25));

    GradTape bad;
    CHECK_THROWS_AS(bad.embedding_mean(emb, {}, nullptr), std::invalid_argument);
    CHECK_THROWS_AS(bad.embedding_mean(emb, {7}, nullptr), std::invalid_argument);
}

TEST_CASE("end-to-end tape gradient matches finite differences") {
    // softmax(W h) feeding follow, clamp, and the loss; differentiates W.
    TripleStore store = toy_store();
    ReifiedMatrices m = reify(store);
    const std::size_t n_e = store.n_entities();
    const std::size_t n_r = store.n_relations();
    const double eps = 1e-6;

    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> d(-0.5, 0.5);
    Matrix w(n_r, 4);
    for (auto& v : w.data) v = d(rng);
    std::vector<double> h(4), x0(n_e, 0.0), y(n_e, 0.0);
    for (auto& v : h) v = d(rng);
    x0[0] = 1.0;
    y[1] = 1.0;  // Padme

    auto loss_of = [&]() {
        GradTape tape;
        NodeId hv = tape.constant(h);
        NodeId r = tape.softmax(tape.matvec(w, hv, nullptr));
        NodeId out = tape.follow(m, tape.constant(x0), r);
        NodeId clamped = tape.clamp_unit(out, eps);
        NodeId loss = tape.multilabel_loss(y, clamped);
        return std::pair<GradTape, NodeId>(std::move(tape), loss);
    };

    Matrix dw(n_r, 4);
    {
        GradTape tape;
        NodeId hv = tape.constant(h);
        NodeId r = tape.softmax(tape.matvec(w, hv, &dw));
        NodeId out = tape.follow(m, tape.constant(x0), r);
        NodeId clamped = tape.clamp_unit(out, eps);
        NodeId loss = tape.multilabel_loss(y, clamped);
        tape.backward(loss);
        CHECK(tape.value(loss).size() == 1);
    }

    const double step = 1e-5;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double saved = w.data[i];
        w.data[i] = saved + step;
        auto [tp, lp] = loss_of();
        w.data[i] = saved - step;
        auto [tm, lm] = loss_of();
        w.data[i] = saved;
        const double fd = (tp.value(lp)[0] - tm.value(lm)[0]) / (2.0 * step);
        const double an = dw.data[i];
        const double denom = std::max(std::max(std::abs(fd), std::abs(an)), 1e-6);
        CHECK(std::abs(fd - an) / denom <= 1e-4);
    }
}

TEST_CASE("tape intersection keeps minimum semantics under gradients") {
    GradTape tape;
    NodeId a = tape.constant({0.2, 0.8, 0.5});
    NodeId b = tape.constant({0.6, 0.3, 0.5});
    NodeId m = tape.intersect_min(a, b);
    CHECK(tape.value(m) == std::vector<double>{0.2, 0.3, 0.5});
    tape.backward(m);
    CHECK(tape.grad(a) == std::vector<double>{1.0, 0.0, 0.5});
    CHECK(tape.grad(b) == std::vector<double>{0.0, 1.0, 0.5});
}
