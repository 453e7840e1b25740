// Walk through the main pipelines on simulated data: pairwise MI, a
// dependence tree, a lag estimate and a change-point scan.

#include <iomanip>
#include <iostream>

#include "cetk/cetk.hpp"

int main() {
    using namespace cetk;

    // Gaussian chain x1 - x2 - x3 plus an unrelated x4
    Matrix corr = Matrix::Identity(4, 4);
    corr(0, 1) = corr(1, 0) = 0.8;
    corr(1, 2) = corr(2, 1) = 0.8;
    corr(0, 2) = corr(2, 0) = 0.64;
    const Dataset d = sim::sample_mvn(Vector::Zero(4), corr, 1000, 42);

    std::cout << std::fixed << std::setprecision(3);
    const auto mi = ce_matrix(d);
    std::cout << "pairwise MI (nats)\n";
    for (Eigen::Index i = 0; i < mi.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < mi.values.cols(); ++j) {
            std::cout << std::setw(8) << mi.values(i, j);
        }
        std::cout << '\n';
    }
    std::cout << "closed form for rho = 0.8: " << sim::gaussian_mi(0.8) << "\n\n";

    std::cout << "Chow-Liu tree\n";
    write_edge_list(std::cout, chow_liu_tree(d));

    const auto s = sim::make_lagged_system(sim::LaggedSystem::random_input, 4, 1000, 7);
    const auto profile = estimate_time_lag(s.source, s.target, 8);
    std::cout << "\ntransfer entropy by lag\n";
    for (std::size_t i = 0; i < profile.lags.size(); ++i) {
        std::cout << "  lag " << profile.lags[i] << ": " << profile.te[i] << '\n';
    }
    std::cout << "estimated lag " << profile.best_lag << " (true 4)\n";

    const auto series =
        sim::make_piecewise_series(sim::change_setting(sim::ChangeSetting::uni_mean_var), 100, 3);
    const auto cps = multi_change_point(series.data);
    std::cout << "\nchange points:";
    for (const auto i : cps.indices) {
        std::cout << ' ' << i;
    }
    std::cout << " (true 100 200 300)\n";
    return 0;
}
