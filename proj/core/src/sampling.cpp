#include "gclt/sampling.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "gclt/errors.hpp"
#include "gclt/rng.hpp"

namespace gclt {

namespace {

constexpr int kGridCap = 2048;
constexpr char kMagic[5] = {'G', 'C', 'L', 'T', '1'};

void append_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xFF));
}

void append_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(char((v >> (8 * i)) & 0xFF));
}

void append_f64(std::string& out, double v) {
    append_u64(out, std::bit_cast<std::uint64_t>(v));
}

class Cursor {
public:
    Cursor(const std::string& data, const std::string& path)
        : data_(data), path_(path) {}

    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(byte()) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(byte()) << (8 * i);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string bytes(std::size_t n) {
        need(n);
        std::string out = data_.substr(pos_, n);
        pos_ += n;
        return out;
    }
    bool exhausted() const { return pos_ == data_.size(); }

private:
    unsigned char byte() {
        need(1);
        return static_cast<unsigned char>(data_[pos_++]);
    }
    void need(std::size_t n) {
        if (pos_ + n > data_.size())
            throw std::runtime_error("truncated ensemble file: " + path_);
    }
    const std::string& data_;
    std::string path_;
    std::size_t pos_ = 0;
};

} // namespace

TimeGrid::TimeGrid(double t_max, int n_steps) : t_max_(t_max), n_steps_(n_steps) {
    if (!(t_max > 0)) throw std::domain_error("TimeGrid requires t_max > 0");
    if (n_steps < 1) throw std::domain_error("TimeGrid requires n_steps >= 1");
    if (n_steps > kGridCap)
        throw std::domain_error("TimeGrid exceeds the 2048-point cap");
}

std::vector<double> TimeGrid::times() const {
    std::vector<double> out(n_steps_);
    for (int i = 0; i < n_steps_; ++i) out[i] = time(i);
    return out;
}

GramFactor::GramFactor(const Kernel& kernel, const TimeGrid& grid) {
    const int n = grid.n_steps();
    Eigen::MatrixXd gram(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j)
            gram(i, j) = gram(j, i) = kernel(grid.time(i), grid.time(j));

    const double unit = gram.trace() / n;
    const double ladder[] = {0.0, 1e-12, 1e-10, 1e-8};
    for (double level : ladder) {
        Eigen::MatrixXd work = gram;
        if (level > 0) work.diagonal().array() += level * unit;
        Eigen::LLT<Eigen::MatrixXd> llt(work);
        if (llt.info() == Eigen::Success) {
            lower_ = llt.matrixL();
            jitter_ = level * unit;
            return;
        }
    }
    throw SingularGramError("Gram factorization failed at max jitter for " +
                            kernel.spec() + " on " + std::to_string(n) +
                            " points up to t=" + std::to_string(grid.t_max()));
}

PathEnsemble sample_ensemble(const Kernel& kernel, const TimeGrid& grid, int dim,
                             int n_paths, std::uint64_t seed,
                             std::uint32_t pair_index) {
    if (dim < 1) throw std::domain_error("dim must be >= 1");
    if (n_paths < 1) throw std::domain_error("n_paths must be >= 1");
    GramFactor factor(kernel, grid);
    const int n = grid.n_steps();

    PathEnsemble out{kernel, grid, dim, n_paths, seed, pair_index,
                     factor.jitter(), {}};
    out.data.resize(std::size_t(n_paths) * dim * n);

    // Column-blocked L * Z keeps the draws per (path, component) addressable
    // while letting Eigen run the triangular product on panels. The panel
    // width is fixed (tail zero-padded) so a path's bits do not depend on
    // how many other paths were requested.
    const auto& lower = factor.lower();
    const std::size_t total = std::size_t(n_paths) * dim;
    const std::size_t block = 512;
    Eigen::MatrixXd z(n, block);
    for (std::size_t start = 0; start < total; start += block) {
        const std::size_t cols = std::min(block, total - start);
        for (std::size_t c = 0; c < cols; ++c) {
            const std::size_t flat = start + c;
            const auto path = std::uint32_t(flat / dim);
            const auto comp = std::uint32_t(flat % dim);
            CounterStream stream(seed, pair_index, path, comp);
            for (int i = 0; i < n; ++i) z(i, c) = stream.normal();
        }
        if (cols < block) z.rightCols(Eigen::Index(block - cols)).setZero();
        z = lower.triangularView<Eigen::Lower>() * z;
        for (std::size_t c = 0; c < cols; ++c) {
            double* dst = out.data.data() + (start + c) * n;
            Eigen::VectorXd::Map(dst, n) = z.col(c);
        }
    }
    return out;
}

std::pair<PathEnsemble, PathEnsemble> sample_pair(const Kernel& kernel,
                                                  const TimeGrid& grid1,
                                                  const TimeGrid& grid2, int dim,
                                                  int n_paths,
                                                  std::uint64_t seed) {
    return {sample_ensemble(kernel, grid1, dim, n_paths, seed, 0),
            sample_ensemble(kernel, grid2, dim, n_paths, seed, 1)};
}

void write_ensemble(const PathEnsemble& ensemble, const std::string& path) {
    std::string buf;
    buf.append(kMagic, sizeof kMagic);
    const std::string spec = ensemble.kernel.spec();
    append_u32(buf, std::uint32_t(spec.size()));
    buf += spec;
    append_f64(buf, ensemble.grid.t_max());
    append_u32(buf, std::uint32_t(ensemble.grid.n_steps()));
    append_u32(buf, std::uint32_t(ensemble.dim));
    append_u32(buf, std::uint32_t(ensemble.n_paths));
    append_u64(buf, ensemble.seed);
    buf.reserve(buf.size() + 8 * ensemble.data.size());
    for (double v : ensemble.data) append_f64(buf, v);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    out.write(buf.data(), std::streamsize(buf.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

PathEnsemble read_ensemble(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for read: " + path);
    std::string data((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    Cursor cur(data, path);
    if (cur.bytes(sizeof kMagic) != std::string(kMagic, sizeof kMagic))
        throw std::runtime_error("bad magic in ensemble file: " + path);
    Kernel kernel = Kernel::parse(cur.bytes(cur.u32()));
    const double t_max = cur.f64();
    const int n_steps = int(cur.u32());
    const int dim = int(cur.u32());
    const int n_paths = int(cur.u32());
    const std::uint64_t seed = cur.u64();

    PathEnsemble out{kernel, TimeGrid(t_max, n_steps), dim, n_paths, seed, 0,
                     0.0, {}};
    const std::size_t count = std::size_t(n_paths) * dim * n_steps;
    out.data.resize(count);
    for (std::size_t i = 0; i < count; ++i) out.data[i] = cur.f64();
    if (!cur.exhausted())
        throw std::runtime_error("trailing bytes in ensemble file: " + path);
    return out;
}

} // namespace gclt
