#include "support/fd_laplacian.hpp"

#include <cmath>
#include <stdexcept>

namespace support {

namespace {

double laplacian_once(const FlatFn& u, const std::vector<double>& betas,
                      int euclidean_dim, const std::vector<double>& at,
                      double h) {
    std::vector<double> p = at;
    auto second = [&](int idx) {
        double saved = p[static_cast<std::size_t>(idx)];
        p[static_cast<std::size_t>(idx)] = saved + h;
        double up = u(p);
        p[static_cast<std::size_t>(idx)] = saved - h;
        double um = u(p);
        p[static_cast<std::size_t>(idx)] = saved;
        return (up - 2.0 * u(p) + um) / (h * h);
    };
    auto first = [&](int idx) {
        double saved = p[static_cast<std::size_t>(idx)];
        p[static_cast<std::size_t>(idx)] = saved + h;
        double up = u(p);
        p[static_cast<std::size_t>(idx)] = saved - h;
        double um = u(p);
        p[static_cast<std::size_t>(idx)] = saved;
        return (up - um) / (2.0 * h);
    };
    double sum = 0.0;
    for (std::size_t a = 0; a < betas.size(); ++a) {
        int ir = static_cast<int>(2 * a);
        int it = ir + 1;
        double r = at[static_cast<std::size_t>(ir)];
        double beta = betas[a];
        sum += second(ir) + first(ir) / r + second(it) / (beta * beta * r * r);
    }
    int base = static_cast<int>(2 * betas.size());
    for (int i = 0; i < euclidean_dim; ++i) sum += second(base + i);
    return sum;
}

}  // namespace

double fd_laplacian(const FlatFn& u, const std::vector<double>& betas,
                    int euclidean_dim, const std::vector<double>& at,
                    double step) {
    if (at.size() != 2 * betas.size() + static_cast<std::size_t>(euclidean_dim))
        throw std::invalid_argument("fd_laplacian: coordinate count mismatch");
    if (!(step > 0.0)) throw std::invalid_argument("fd_laplacian: step must be positive");
    for (std::size_t a = 0; a < betas.size(); ++a)
        if (!(at[2 * a] > 2.0 * step))
            throw std::invalid_argument(
                "fd_laplacian: cone radius too small for the stencil");
    double coarse = laplacian_once(u, betas, euclidean_dim, at, step);
    double fine = laplacian_once(u, betas, euclidean_dim, at, step / 2.0);
    return (4.0 * fine - coarse) / 3.0;
}

}  // namespace support
