#include <doctest.h>

#include <cmath>
#include <random>

#include "rrrekf/diagnostics.hpp"
#include "test_helpers.hpp"

using namespace rrrekf;

TEST_CASE("crb_percent") {
    SUBCASE("table value") {
        Vector theta(1);
        theta << 4.6469;
        Matrix P(1, 1);
        P << 0.0179 * 0.0179;
        CHECK(crb_percent(theta, P)[0] == doctest::Approx(0.385).epsilon(1e-3));
    }
    SUBCASE("zero sigma gives zero percent") {
        Vector theta(1);
        theta << 2.0;
        CHECK(crb_percent(theta, Matrix::Zero(1, 1))[0] == 0.0);
    }
    SUBCASE("sign-insensitive") {
        Vector theta(1);
        theta << -17.0;
        Matrix P(1, 1);
        P << 1.7 * 1.7;
        CHECK(crb_percent(theta, P)[0] == doctest::Approx(10.0).epsilon(1e-12));
    }
    SUBCASE("zero theta flagged infinite") {
        Vector theta(2);
        theta << 0.0, 1.0;
        const Vector out = crb_percent(theta, Matrix::Identity(2, 2));
        CHECK(std::isinf(out[0]));
        CHECK(out[1] == 100.0);
    }
}

TEST_CASE("correlation_matrix") {
    SUBCASE("diagonal covariance gives the identity pattern") {
        Matrix P = Vector::LinSpaced(4, 1.0, 4.0).asDiagonal();
        const Eigen::MatrixXi C = correlation_matrix(P);
        for (Eigen::Index i = 0; i < 4; ++i)
            for (Eigen::Index j = 0; j < 4; ++j) CHECK(C(i, j) == (i == j ? 100 : 0));
    }
    SUBCASE("hand 2x2 with perfect anticorrelation") {
        Matrix P(2, 2);
        P << 4.0, -2.0, -2.0, 1.0;
        const Eigen::MatrixXi C = correlation_matrix(P);
        CHECK(C(0, 1) == -100);
        CHECK(C(1, 0) == -100);
    }
    SUBCASE("rounding is half away from zero") {
        Matrix P(2, 2);
        P << 1.0, 0.345, 0.345, 1.0;
        CHECK(correlation_matrix(P)(0, 1) == 35);  // 34.5 rounds away from zero
    }
    SUBCASE("zero diagonal names the parameter") {
        Matrix P = Matrix::Zero(2, 2);
        P(0, 0) = 1.0;
        CHECK_THROWS_WITH_AS(correlation_matrix(P, {"a", "b"}), doctest::Contains("b"),
                             NumericError);
    }
    SUBCASE("symmetry and diagonal on a random PSD matrix") {
        std::mt19937_64 rng(3);
        Matrix A(6, 6);
        for (Eigen::Index i = 0; i < 36; ++i)
            A(i / 6, i % 6) = test::gaussian_vector(rng, 1)[0];
        Matrix P = A * A.transpose() + 0.1 * Matrix::Identity(6, 6);
        const Eigen::MatrixXi C = correlation_matrix(P);
        CHECK((C - C.transpose()).cwiseAbs().maxCoeff() == 0);
        for (Eigen::Index i = 0; i < 6; ++i) CHECK(C(i, i) == 100);
    }
}

TEST_CASE("noise sample autocorrelation") {
    SUBCASE("constant series: 1 at every lag") {
        FilterTrajectory t = test::blank_smoothed_traj(1, 1, 0, 50);
        for (auto& s : t.resid_smooth) s[0] = 3.0;
        const NoiseSamples ns = noise_samples(t);
        for (Eigen::Index l = 0; l < ns.v_autocorr.cols(); ++l)
            CHECK(ns.v_autocorr(0, l) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("alternating four-sample series: lag-1 value is -1") {
        FilterTrajectory t = test::blank_smoothed_traj(1, 1, 0, 40);
        for (Eigen::Index k = 0; k < 40; ++k) t.resid_smooth[k][0] = (k % 2 == 0) ? 1.0 : -1.0;
        const NoiseSamples ns = noise_samples(t);
        CHECK(ns.v_autocorr(0, 0) == doctest::Approx(1.0));
        CHECK(ns.v_autocorr(0, 1) == doctest::Approx(-1.0));
    }
    SUBCASE("white series stays inside the 3/sqrt(N) band at 95% of lags") {
        const Eigen::Index N = 4000;
        FilterTrajectory t = test::blank_smoothed_traj(1, 1, 0, N);
        std::mt19937_64 rng(2);
        for (auto& s : t.resid_smooth) s[0] = test::gaussian_vector(rng, 1)[0];
        const NoiseSamples ns = noise_samples(t);
        CHECK(ns.v_autocorr(0, 0) == doctest::Approx(1.0));
        const double band = 3.0 / std::sqrt(static_cast<double>(N));
        int inside = 0, total = 0;
        for (Eigen::Index l = 1; l < ns.v_autocorr.cols(); ++l, ++total)
            if (std::abs(ns.v_autocorr(0, l)) < band) ++inside;
        CHECK(total == N / 10);
        CHECK(static_cast<double>(inside) / total >= 0.95);
    }
}

TEST_CASE("weak parameter screen") {
    EstimationReport rep;
    rep.param_names = {"a", "b", "c"};
    rep.pct_crb = Vector(3);

    SUBCASE("flags above threshold, sorted descending") {
        rep.pct_crb << 5.0, 45.0, 25.0;
        const auto weak = weak_parameter_screen(rep, 20.0);
        REQUIRE(weak.size() == 2);
        CHECK(weak[0].name == "b");
        CHECK(weak[1].name == "c");
    }
    SUBCASE("all zero: empty list") {
        rep.pct_crb.setZero();
        CHECK(weak_parameter_screen(rep, 20.0).empty());
    }
    SUBCASE("threshold 0 flags everything with positive pct") {
        rep.pct_crb << 0.1, 0.2, 0.3;
        CHECK(weak_parameter_screen(rep, 0.0).size() == 3);
    }
}
