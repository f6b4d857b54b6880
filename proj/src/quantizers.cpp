#include "locop/quantizers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "locop/error.hpp"
#include "locop/parallel.hpp"
#include "locop/tf.hpp"

namespace locop {
namespace {

void require_tau(double tau, const char* path = "tau") {
  if (!(tau >= 0.0 && tau <= 1.0)) throw Error(ErrorKind::invalid_argument, "tau.range", "tau must lie in [0,1]", path);
}

bool same_extent(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

void require_symbol2(const GridSpec& g) {
  if (g.dim() != 2) fail("symbol.dim", "expected a symbol on R^2");
  if (!same_extent(g.extent(1), g.samples(0) / g.extent(0)))
    fail("symbol.grid", "xi-axis extent must equal N / L of the operator grid");
}

void require_symbol3(const GridSpec& g) {
  if (g.dim() != 3) fail("symbol.dim", "expected a symbol on R^3");
  if (g.samples(0) != g.samples(1) || !same_extent(g.extent(0), g.extent(1)))
    fail("symbol.grid", "x and y axes must coincide");
  if (!same_extent(g.extent(2), g.samples(0) / g.extent(0)))
    fail("symbol.grid", "xi-axis extent must equal N / L of the operator grid");
}

// Rejects inverse transforms that still carry mass near the v-axis edge.
void require_v_decay(const std::vector<double>& column_max) {
  const std::size_t nv = column_max.size();
  const std::size_t half = nv / 2;
  const std::size_t band = std::max<std::size_t>(1, nv / 16);
  double global = 0.0, edge = 0.0;
  for (std::size_t k = 0; k < nv; ++k) {
    global = std::max(global, column_max[k]);
    const std::size_t dist = k >= half ? k - half : half - k;
    if (dist + band >= half) edge = std::max(edge, column_max[k]);
  }
  if (edge > 1e-10 * global)
    throw Error(ErrorKind::numeric_guard, "kernel.resize",
                "inverse symbol transform has not decayed at the v-axis edge; enlarge the xi sampling");
}

}  // namespace

GridSpec symbol_grid2(const GridSpec& op, std::size_t pad) {
  if (op.dim() != 1) fail("grid.dim", "operators act on 1-D grids");
  return GridSpec({op.extent(0), op.dual_extent(0)}, {op.samples(0), pad * op.samples(0)});
}

GridSpec symbol_grid3(const GridSpec& op, std::size_t n_xi) {
  if (op.dim() != 1) fail("grid.dim", "operators act on 1-D grids");
  return GridSpec({op.extent(0), op.extent(0), op.dual_extent(0)}, {op.samples(0), op.samples(0), n_xi});
}

GridSpec operator_grid(const GridSpec& symbol) { return GridSpec({symbol.extent(0)}, {symbol.samples(0)}); }

Eigen::MatrixXcd LinearOperator::apply_columns(const Eigen::MatrixXcd& columns) const {
  const GridSpec& g = grid();
  Eigen::MatrixXcd out(columns.rows(), columns.cols());
  parallel_for(static_cast<std::size_t>(columns.cols()), [&](std::size_t c) {
    const auto col = static_cast<Eigen::Index>(c);
    std::vector<cplx> v(columns.col(col).data(), columns.col(col).data() + columns.rows());
    const SampledField r = apply(SampledField(g, std::move(v)));
    out.col(col) = Eigen::Map<const Eigen::VectorXcd>(r.values().data(), columns.rows());
  });
  return out;
}

KernelMatrix::KernelMatrix(GridSpec grid, Eigen::MatrixXcd entries, std::string label)
    : grid_(std::move(grid)), entries_(std::move(entries)), label_(std::move(label)) {
  if (grid_.dim() != 1) fail("grid.dim", "kernels act on 1-D grids");
  const auto n = static_cast<Eigen::Index>(grid_.samples(0));
  if (entries_.rows() != n || entries_.cols() != n) fail("kernel.shape", "kernel must be N x N");
}

SampledField KernelMatrix::apply(const SampledField& f) const {
  if (!(f.grid() == grid_)) fail("grid.mismatch", "field does not live on the kernel grid");
  const auto in = f.values();
  const Eigen::Map<const Eigen::VectorXcd> v(in.data(), static_cast<Eigen::Index>(in.size()));
  const Eigen::VectorXcd out = entries_ * v * grid_.spacing(0);
  return SampledField(grid_, std::vector<cplx>(out.data(), out.data() + out.size()));
}

Eigen::MatrixXcd KernelMatrix::apply_columns(const Eigen::MatrixXcd& columns) const {
  if (columns.rows() != entries_.cols()) fail("kernel.shape", "column length does not match the kernel");
  return (entries_ * columns) * grid_.spacing(0);
}

double KernelMatrix::spectral_norm() const {
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(entries_ * grid_.spacing(0));
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

KernelMatrix KernelMatrix::scaled(cplx c) const { return KernelMatrix(grid_, entries_ * c, label_); }

SampledField ScaledIdentity::apply(const SampledField& f) const {
  if (!(f.grid() == grid_)) fail("grid.mismatch", "field does not live on the operator grid");
  return scale_ * f;
}

std::string ScaledIdentity::describe() const {
  if (scale_ == cplx(1.0)) return "identity";
  std::ostringstream os;
  os.precision(17);
  os << "scaled_identity(" << scale_.real() << "," << scale_.imag() << ")";
  return os.str();
}

RankOne::RankOne(SampledField image, SampledField probe) : image_(std::move(image)), probe_(std::move(probe)) {
  if (!(image_.grid() == probe_.grid())) fail("grid.mismatch", "rank-one factors on different grids");
}

SampledField RankOne::apply(const SampledField& f) const { return inner_product(f, probe_) * image_; }

FioOperator::FioOperator(const SymbolGrid2& sigma, const PhaseSpec& phase, double tameness_delta)
    : grid_(operator_grid(sigma.sigma.grid())), phase_(phase) {
  const GridSpec& sg = sigma.sigma.grid();
  require_symbol2(sg);
  const std::size_t n = grid_.samples(0);
  const std::size_t nxi = sg.samples(1);
  if (nxi % n != 0) fail("symbol.grid", "xi sampling must be a multiple of the operator sampling");
  const std::size_t stride = nxi / n;
  certificate_ = tameness_check(phase_, std::max(0.5 * grid_.extent(0), 0.5 * grid_.dual_extent(0)), tameness_delta);
  if (!certificate_.pass) fail("phase.not_tame", "phase fails the tameness check");
  const double dxi = grid_.freq_spacing(0);
  quad_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  parallel_for(n, [&](std::size_t i) {
    const double x = grid_.coord(0, i);
    for (std::size_t k = 0; k < n; ++k) {
      const double xi = grid_.freq(0, k);
      const cplx s = sigma.sigma[i * nxi + k * stride];
      quad_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          s * std::polar(dxi, kTwoPi * phase_.value(x, xi));
    }
  });
}

SampledField FioOperator::apply(const SampledField& f) const {
  if (!(f.grid() == grid_)) fail("grid.mismatch", "field does not live on the operator grid");
  const SampledField hat = fourier(f, -1);
  const auto in = hat.values();
  const Eigen::Map<const Eigen::VectorXcd> v(in.data(), static_cast<Eigen::Index>(in.size()));
  const Eigen::VectorXcd out = quad_ * v;
  return SampledField(grid_, std::vector<cplx>(out.data(), out.data() + out.size()));
}

KernelMatrix kernel_tau(const SymbolGrid2& sigma, double tau) {
  require_tau(tau);
  const GridSpec& sg = sigma.sigma.grid();
  require_symbol2(sg);
  const GridSpec op = operator_grid(sg);
  const std::size_t n = op.samples(0);
  const std::size_t nv = sg.samples(1);
  const double h = op.spacing(0);
  const auto N = static_cast<Eigen::Index>(n);
  Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(N, N);
  std::ostringstream label;
  label.precision(17);
  label << "op_tau(" << tau << ")";

  if (sigma.constant_like) {
    for (std::size_t i = 0; i < n; ++i) k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = sigma.sigma[i * nv] / h;
    return KernelMatrix(op, std::move(k), label.str());
  }

  const int axis[1] = {1};
  const SampledField check = fourier_axes(sigma.sigma, axis, +1);
  std::vector<double> column_max(nv, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < nv; ++c) column_max[c] = std::max(column_max[c], std::abs(check[i * nv + c]));
  require_v_decay(column_max);

  const long half = static_cast<long>(nv / 2);
  const long reach = std::min(static_cast<long>(n) - 1, half - 1);
  parallel_for(static_cast<std::size_t>(2 * reach + 1), [&](std::size_t slot) {
    const long m = static_cast<long>(slot) - reach;
    const std::size_t col = static_cast<std::size_t>(m + half);
    if (column_max[col] == 0.0) return;
    std::vector<cplx> s(n);
    for (std::size_t j = 0; j < n; ++j) s[j] = check[j * nv + col];
    const double t = tau * static_cast<double>(m);  // shift in units of h
    std::vector<cplx> shifted(n);
    if (std::abs(t - std::round(t)) < 1e-12) {
      const long sh = static_cast<long>(std::round(t));
      for (std::size_t j = 0; j < n; ++j) {
        const long src = ((static_cast<long>(j) + sh) % static_cast<long>(n) + static_cast<long>(n)) % static_cast<long>(n);
        shifted[j] = s[static_cast<std::size_t>(src)];
      }
    } else {
      const double by[1] = {-t * h};
      const SampledField moved = translate(SampledField(op, std::move(s)), by);
      std::copy(moved.values().begin(), moved.values().end(), shifted.begin());
    }
    for (std::size_t j = 0; j < n; ++j) {
      const long i = static_cast<long>(j) + m;
      if (i < 0 || i >= static_cast<long>(n)) continue;
      k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = shifted[j];
    }
  });
  return KernelMatrix(op, std::move(k), label.str());
}

KernelMatrix kernel_threeparam(const SampledField& sigma3) {
  const GridSpec& sg = sigma3.grid();
  require_symbol3(sg);
  const GridSpec op = operator_grid(sg);
  const std::size_t n = op.samples(0);
  const std::size_t nv = sg.samples(2);
  const int axis[1] = {2};
  const SampledField check = fourier_axes(sigma3, axis, +1);
  std::vector<double> column_max(nv, 0.0);
  for (std::size_t i = 0; i < n * n; ++i)
    for (std::size_t c = 0; c < nv; ++c) column_max[c] = std::max(column_max[c], std::abs(check[i * nv + c]));
  require_v_decay(column_max);
  const long half = static_cast<long>(nv / 2);
  const auto N = static_cast<Eigen::Index>(n);
  Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(N, N);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const long m = static_cast<long>(i) - static_cast<long>(j);
      if (m <= -half || m >= half) continue;
      k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          check[(i * n + j) * nv + static_cast<std::size_t>(m + half)];
    }
  return KernelMatrix(op, std::move(k), "three_parameter");
}

SymbolGrid2 tau_transform(const SymbolGrid2& sigma, double tau1, double tau2) {
  require_tau(tau1, "tau");
  require_tau(tau2, "tau2");
  if (tau1 == tau2) throw Error(ErrorKind::invalid_argument, "tau.distinct", "tau transform needs tau1 != tau2");
  require_symbol2(sigma.sigma.grid());
  if (sigma.constant_like) return sigma;
  SampledField hat = fourier(sigma.sigma, -1);
  const GridSpec& dual = hat.grid();
  const std::size_t n1 = dual.samples(1);
  const double c = kTwoPi * (tau2 - tau1);
  parallel_for(dual.samples(0), [&](std::size_t i) {
    const double e1 = dual.coord(0, i);
    for (std::size_t j = 0; j < n1; ++j) hat[i * n1 + j] *= std::polar(1.0, c * e1 * dual.coord(1, j));
  });
  const SampledField back = fourier(hat, +1);
  return {SampledField(sigma.sigma.grid(), std::vector<cplx>(back.values().begin(), back.values().end())), false};
}

SampledField conjugated_field(const SampledField& sigma3, const PhasePoint& w, PairingPath path) {
  const GridSpec& sg = sigma3.grid();
  require_symbol3(sg);
  const GridSpec op = operator_grid(sg);
  if (std::abs(w.x[0]) > 0.25 * op.extent(0) || std::abs(w.xi[0]) > 0.25 * op.dual_extent(0))
    fail("shift.margin", "conjugation shift exceeds a quarter of the grid extent");
  const SampledField phi = WindowSpec::gaussian(1).atom(op, PhasePoint{});
  if (path == PairingPath::symbol_translation) {
    const double shift[3] = {w.x[0], w.x[0], w.xi[0]};
    const SampledField moved = translate(sigma3, shift);
    return kernel_threeparam(moved).apply(phi);
  }
  const SampledField g = tf_shift_adjoint(phi, w);
  return tf_shift(kernel_threeparam(sigma3).apply(g), w);
}

cplx conjugated_pairing(const SampledField& sigma3, const PhasePoint& w, const PhasePoint& z, PairingPath path) {
  const SampledField field = conjugated_field(sigma3, w, path);
  return inner_product(field, WindowSpec::gaussian(1).atom(field.grid(), z));
}

}  // namespace locop
