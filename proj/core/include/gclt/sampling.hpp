#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gclt/kernels.hpp"

namespace gclt {

// Uniform grid t_i = t_max * i / n_steps, i = 1..n_steps.  0 is excluded:
// X_0 = 0 exactly and integration code supplies the origin node itself.
class TimeGrid {
public:
    TimeGrid(double t_max, int n_steps);

    double t_max() const { return t_max_; }
    int n_steps() const { return n_steps_; }
    double step() const { return t_max_ / n_steps_; }
    // i is the storage index, 0-based; time(0) is the first positive node.
    double time(int i) const { return t_max_ * double(i + 1) / n_steps_; }
    std::vector<double> times() const;

    bool operator==(const TimeGrid&) const = default;

private:
    double t_max_;
    int n_steps_;
};

// Lower Cholesky factor of the Gram matrix on the grid.  An escalating
// diagonal jitter ladder {0, 1e-12, 1e-10, 1e-8} * trace/n is tried in order;
// the first level that factorizes is kept and recorded.
class GramFactor {
public:
    GramFactor(const Kernel& kernel, const TimeGrid& grid);

    const Eigen::MatrixXd& lower() const { return lower_; }
    double jitter() const { return jitter_; }

private:
    Eigen::MatrixXd lower_;
    double jitter_ = 0.0;
};

struct PathEnsemble {
    Kernel kernel;
    TimeGrid grid;
    int dim = 1;
    int n_paths = 0;
    std::uint64_t seed = 0;
    std::uint32_t pair_index = 0;
    double jitter = 0.0;
    std::vector<double> data; // row-major [path][component][time]

    double value(int path, int component, int t_index) const {
        return data[(std::size_t(path) * dim + component) * grid.n_steps() + t_index];
    }
    std::span<const double> component(int path, int comp) const {
        return {data.data() + (std::size_t(path) * dim + comp) * grid.n_steps(),
                std::size_t(grid.n_steps())};
    }
};

PathEnsemble sample_ensemble(const Kernel& kernel, const TimeGrid& grid, int dim,
                             int n_paths, std::uint64_t seed,
                             std::uint32_t pair_index = 0);

// Two independent copies with disjoint streams (pair indices 0 and 1).
std::pair<PathEnsemble, PathEnsemble> sample_pair(const Kernel& kernel,
                                                  const TimeGrid& grid1,
                                                  const TimeGrid& grid2, int dim,
                                                  int n_paths,
                                                  std::uint64_t seed);

// Binary dump: magic "GCLT1", then little-endian header (kernel spec string,
// t_max, n_steps, dim, n_paths, seed) and row-major float64 data.
void write_ensemble(const PathEnsemble& ensemble, const std::string& path);
PathEnsemble read_ensemble(const std::string& path);

} // namespace gclt
