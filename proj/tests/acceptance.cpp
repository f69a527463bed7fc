#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "eitprop/analysis.hpp"
#include "eitprop/grid.hpp"
#include "eitprop/medium.hpp"
#include "eitprop/propagation.hpp"
#include "eitprop/scenes.hpp"

using namespace eitprop;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [not met]");
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

MediumParams cell(double delta_sign, double vg_over_qd = 1.0, double gamma_hz = 70e3) {
  MediumParams p;
  p.gamma = 2.0 * kPi * gamma_hz;
  p.delta = delta_sign * p.gamma;
  p.gamma_p = pump_power_for(vg_over_qd * p.q() * p.diffusion, p);
  return p;
}

double k0_of(const MediumParams& p) { return std::sqrt(p.gamma / p.diffusion); }

ComplexField random_field(const Grid2D& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexField f(g);
  for (auto& v : f.values()) v = {n(rng), n(rng)};
  return f;
}

double max_abs_diff(const ComplexField& a, const ComplexField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

double max_abs(const ComplexField& a) {
  double m = 0.0;
  for (const auto& v : a.values()) m = std::max(m, std::abs(v));
  return m;
}

ComplexField two_rectangles(const Grid2D& g) {
  ComplexField f(g);
  for (std::size_t iy = 0; iy < g.ny(); ++iy) {
    for (std::size_t ix = 0; ix < g.nx(); ++ix) {
      const double x = g.x(ix);
      const double y = g.y(iy);
      if ((std::abs(x + 0.8e-3) < 0.4e-3 && std::abs(y) < 1.2e-3) ||
          (std::abs(x - 0.7e-3) < 0.5e-3 && std::abs(y - 0.4e-3) < 0.3e-3)) {
        f(ix, iy) = 1.0;
      }
    }
  }
  return f;
}

Outcome derived() {
  Outcome o;
  MediumParams p = cell(-1.0);
  p.wavelength = 794.98e-9;
  p.gamma_p = pump_power_for(p.q() * p.diffusion, p);
  const DerivedQuantities d = derived_quantities(p);
  o.require(std::abs(d.k0 * 1e-3 / 20.0 - 1.0) < 0.01, "k0 = " + fmt("%.4g", d.k0 * 1e-3) + " /mm");
  o.require(d.group_velocity && std::abs(*d.group_velocity / 8690.0 - 1.0) < 0.02,
            "v_g = " + fmt("%.5g", d.group_velocity.value_or(0.0)) + " m/s");
  const double delay = group_delay(p, 0.05);
  o.require(std::abs(delay / 5.75e-6 - 1.0) < 0.02, "delay(50 mm) = " + fmt("%.4g", delay * 1e6) + " us");
  MediumParams lens = p;
  lens.gamma = 2.0 * kPi * 30e3;
  const double k0_lens = derived_quantities(lens).k0;
  o.require(std::abs(k0_lens * 1e-3 / 13.1 - 1.0) < 0.02, "k0(30 kHz) = " + fmt("%.4g", k0_lens * 1e-3) + " /mm");
  return o;
}

Outcome free_space_oracle() {
  Outcome o;
  const Grid2D g = make_grid(1024, 1024, 5e-6, 5e-6);
  const double w0 = 100e-6;
  const double L = 0.05;
  const double lambda = kRb87D1Wavelength;
  const ComplexField in = gaussian_beam(g, w0, {}, {}, lambda);
  const ComplexField out = propagate(in, free_space_tf(g, 2.0 * kPi / lambda, L));
  const double zr = kPi * w0 * w0 / lambda;
  const double expected = w0 * std::sqrt(1.0 + (L / zr) * (L / zr));
  const double measured = 2.0 * rms_width(intensity(out)).x;
  const double err = std::abs(measured / expected - 1.0);
  const double energy = std::abs(out.power() / in.power() - 1.0);
  o.require(err < 1e-6, "w(z) = " + fmt("%.6g", measured * 1e6) + " um, rel err " + fmt("%.2e", err));
  o.require(energy < 1e-12, "energy drift " + fmt("%.2e", energy));
  return o;
}

Outcome cancellation() {
  Outcome o;
  for (double sign : {-1.0, 1.0}) {
    const MediumParams p = cell(sign);
    const Complex c2 = fd_taylor_c2([&](double k) { return chi_total({k, 0.0}, p); }, 0.0, k0_of(p) / 50.0);
    const double free = 1.0 / (2.0 * p.q());
    if (sign < 0) {
      o.require(std::abs(c2) < 1e-3 * free, "-Gamma: |c2| (2q) = " + fmt("%.2e", std::abs(c2) / free));
    } else {
      const double ratio = c2.real() * p.q();
      o.require(std::abs(ratio + 1.0) < 1e-3 && std::abs(c2.imag()) < 1e-3 * free,
                "+Gamma: c2 q = " + fmt("%.6f", ratio));
    }
  }
  return o;
}

struct ImageRuns {
  double elimination = 0.0;
  double free = 0.0;
  double doubling = 0.0;
};

ImageRuns image_runs() {
  const Grid2D g = make_grid(512, 512, 20e-6, 20e-6);
  const double L = 0.05;
  const MediumParams minus = cell(-1.0);
  const MediumParams plus = cell(1.0);
  const ComplexField in = iris_filter(two_rectangles(g), 0.2 * k0_of(minus));
  ImageRuns r;
  r.elimination = relative_l2(normalize_uniform_loss(propagate(in, eit_tf(g, minus, L)), minus, L), in);
  r.free = relative_l2(propagate(in, free_space_tf(g, minus.q(), L)), in);
  r.doubling = relative_l2(normalize_uniform_loss(propagate(in, eit_tf(g, plus, L)), plus, L),
                           propagate(in, free_space_tf(g, plus.q(), 2.0 * L)));
  return r;
}

Outcome elimination(const ImageRuns& r) {
  Outcome o;
  o.require(r.elimination < 0.01, "EIT rel L2 " + fmt("%.2e", r.elimination));
  o.require(r.free > 10.0 * r.elimination, "free-space rel L2 " + fmt("%.2e", r.free));
  return o;
}

Outcome doubling(const ImageRuns& r) {
  Outcome o;
  o.require(r.doubling < 0.01, "rel L2 vs free space over 100 mm " + fmt("%.2e", r.doubling));
  return o;
}

Outcome talbot() {
  Outcome o;
  const Grid2D g = make_grid(1024, 1024, 5e-6, 5e-6);
  const GratingSpec spec{302e-6, 0.5, GratingAxis::kX, 2e-3};
  const ComplexField in = binary_grating(g, spec);
  const double L = 0.05;
  auto contrast_after = [&](const TransferFunction& tf) {
    return grating_contrast(intensity(propagate(in, tf)), spec).contrast;
  };
  const double c_free = contrast_after(free_space_tf(g, FreeSpace{}.q(), L));
  const double c_minus = contrast_after(eit_tf(g, cell(-1.0), L));
  const double c_plus = contrast_after(eit_tf(g, cell(1.0), L));
  const double c_zero = contrast_after(eit_tf(g, cell(0.0), L));
  o.require(std::abs(c_free) < 0.2, "free C = " + fmt("%.3f", c_free));
  o.require(c_minus >= 0.85, "-Gamma C = " + fmt("%.3f", c_minus) + " (>= 0.85)");
  o.require(c_plus <= -0.5, "+Gamma C = " + fmt("%.3f", c_plus));
  o.require(c_zero < c_minus, "Delta=0 C = " + fmt("%.3f", c_zero));
  return o;
}

Outcome walk_off() {
  Outcome o;
  const Grid2D g = make_grid(512, 512, 20e-6, 20e-6);
  const ComplexField in = gaussian_beam(g, 1e-3);
  const double L = 0.05;
  MediumParams p = cell(-1.0);
  const double theta_max = 0.1 * k0_of(p) / p.q();
  double worst_ratio = 1.0;
  double worst_tilt = 0.0;
  bool flips = true;
  for (int i = 1; i <= 10; ++i) {
    const double theta = theta_max * i / 10.0;
    for (double sign : {-1.0, 1.0}) {
      MediumParams m = cell(sign);
      m.theta_pump = {theta, 0.0};
      const DeflectionReport r = deflection_measurement(in, propagate(in, eit_tf(g, m, L)), L, m.wavelength);
      const double ratio = r.theta_probe.x / theta;
      if (sign < 0) {
        if (std::abs(ratio - 1.0) > std::abs(worst_ratio - 1.0)) worst_ratio = ratio;
        worst_tilt = std::max({worst_tilt, std::abs(r.residual_tilt.x), std::abs(r.residual_tilt.y)});
      } else {
        flips = flips && ratio < 0.0;
      }
    }
  }
  o.require(worst_ratio >= 0.95 && worst_ratio <= 1.05, "worst theta_probe/theta_pump " + fmt("%.4f", worst_ratio));
  o.require(worst_tilt < 0.02e-3, "max residual tilt " + fmt("%.2e", worst_tilt * 1e3) + " mrad");
  o.require(flips, "+Gamma deflects opposite");
  return o;
}

Outcome lens() {
  Outcome o;
  const Grid2D g = make_grid(1024, 1024, 5e-6, 5e-6);
  const MediumParams p = cell(-1.0, 0.5, 30e3);
  const DerivedQuantities d = derived_quantities(p);
  o.require(d.effective_index && std::abs(*d.effective_index + 1.0) < 1e-9,
            "n_eff = " + fmt("%.6f", d.effective_index.value_or(0.0)));
  const ComplexField src = iris_filter(point_source(g, 25e-6), 0.9 * k0_of(p));
  const FreeSpace fs{p.wavelength};
  auto image = [&](double u, double v) {
    OpticalTrain t{{Segment{fs, u}, Segment{EitMedium{p}, 0.05}, Segment{fs, v}}, {}};
    return normalize_uniform_loss(run_train(src, t).output, p, 0.05);
  };
  const ComplexField a = image(0.025, 0.025);
  const ComplexField b = image(0.010, 0.040);
  const double ratio = rms_width(intensity(a)).x / rms_width(intensity(src)).x;
  o.require(std::abs(ratio - 1.0) < 0.25, "output/source RMS width " + fmt("%.3f", ratio));
  const double moved = relative_l2(b, a);
  o.require(moved < 0.05, "repositioned cell rel L2 " + fmt("%.2e", moved));
  return o;
}

Outcome transmission_check() {
  Outcome o;
  const MediumParams p = cell(-1.0);
  const auto t = transmission_spectrum(p, {-p.gamma, p.gamma, 100.0 * p.gamma}, 0.05);
  for (int i = 0; i < 2; ++i) {
    o.require(t[i].transmission >= 0.005 && t[i].transmission <= 0.05,
              std::string(i == 0 ? "T(-Gamma) = " : "T(+Gamma) = ") + fmt("%.4f", t[i].transmission));
  }
  o.require(std::abs(t[2].transmission / std::exp(-6.0) - 1.0) < 0.01,
            "T(100 Gamma) e^6 = " + fmt("%.4f", t[2].transmission * std::exp(6.0)));
  return o;
}

Outcome properties() {
  Outcome o;
  const Grid2D g = make_grid(128, 96, 20e-6, 20e-6);
  const MediumParams p = cell(1.0);
  const TransferFunction h = eit_tf(g, p, 0.05);

  double lin = 0.0;
  double rev = 0.0;
  double comp = 0.0;
  double parseval = 0.0;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const ComplexField f = random_field(g, seed);
    const ComplexField k = random_field(g, 1000 + seed);
    const Complex a(0.3, -1.1);
    const Complex b(1.7, 0.2);
    ComplexField mix(g);
    for (std::size_t i = 0; i < g.size(); ++i) mix.values()[i] = a * f.values()[i] + b * k.values()[i];
    const ComplexField lhs = propagate(mix, h);
    const ComplexField pf = propagate(f, h);
    const ComplexField pk = propagate(k, h);
    ComplexField rhs(g);
    for (std::size_t i = 0; i < g.size(); ++i) rhs.values()[i] = a * pf.values()[i] + b * pk.values()[i];
    lin = std::max(lin, max_abs_diff(lhs, rhs) / max_abs(lhs));

    const TransferFunction fwd = free_space_tf(g, p.q(), 0.01 * seed);
    const TransferFunction back = free_space_tf(g, p.q(), -0.01 * seed);
    rev = std::max(rev, max_abs_diff(propagate(propagate(f, fwd), back), f) / max_abs(f));

    const SpectralField s = to_spectrum(f);
    double spectral = 0.0;
    for (const Complex& v : s.values()) spectral += std::norm(v);
    spectral *= g.dkx() * g.dky() / (4.0 * kPi * kPi);
    double spatial = 0.0;
    for (const Complex& v : f.values()) spatial += std::norm(v);
    spatial *= g.dx() * g.dy();
    parseval = std::max(parseval, std::abs(spectral / spatial - 1.0));
  }
  const TransferFunction h1 = eit_tf(g, p, 0.02);
  const TransferFunction h2 = eit_tf(g, p, 0.03);
  for (std::size_t i = 0; i < g.size(); ++i) {
    comp = std::max(comp, std::abs(h1.values()[i] * h2.values()[i] - h.values()[i]) / std::abs(h.values()[i]));
  }

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> kd(-6e4, 6e4);
  std::uniform_real_distribution<double> td(-1e-3, 1e-3);
  bool tilt = true;
  for (int i = 0; i < 1000; ++i) {
    MediumParams m = cell(-1.0);
    MediumParams tilted = m;
    tilted.theta_pump = {td(rng), td(rng)};
    const Vec2 k{kd(rng), kd(rng)};
    tilt = tilt && chi_eit(k, tilted) == chi_eit(k - tilted.q() * tilted.theta_pump, m);
  }

  const Grid2D gg = make_grid(512, 64, 302e-6 / 32.0, 302e-6 / 32.0);
  const GratingSpec spec{302e-6, 0.5, GratingAxis::kX, std::nullopt};
  IntensityMap im = intensity(propagate(binary_grating(gg, spec), free_space_tf(gg, p.q(), 0.03)));
  const double c1 = grating_contrast(im, spec).contrast;
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  double scaling = 0.0;
  for (int i = 0; i < 5; ++i) {
    IntensityMap scaled = im;
    const double s = scale(rng);
    for (double& v : scaled.values) v *= s;
    scaling = std::max(scaling, std::abs(grating_contrast(scaled, spec).contrast - c1));
  }

  o.require(lin < 1e-12, "linearity " + fmt("%.1e", lin));
  o.require(comp < 1e-12, "composition " + fmt("%.1e", comp));
  o.require(rev < 1e-12, "reversibility " + fmt("%.1e", rev));
  o.require(parseval < 1e-12, "Parseval " + fmt("%.1e", parseval));
  o.require(tilt, "tilt covariance");
  o.require(scaling < 1e-12, "contrast scaling " + fmt("%.1e", scaling));
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  ImageRuns images;
  bool images_ready = false;
  auto get_images = [&]() -> const ImageRuns& {
    if (!images_ready) {
      images = image_runs();
      images_ready = true;
    }
    return images;
  };

  const std::vector<Criterion> criteria{
      {1, "derived quantities", derived},
      {2, "free-space Gaussian oracle", free_space_oracle},
      {3, "quadratic cancellation", cancellation},
      {4, "elimination of diffraction", [&] { return elimination(get_images()); }},
      {5, "doubled diffraction", [&] { return doubling(get_images()); }},
      {6, "Talbot grating contrast", talbot},
      {7, "walk-off", walk_off},
      {8, "negative-diffraction lens", lens},
      {9, "transmission", transmission_check},
      {10, "property suites", properties},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d: %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
