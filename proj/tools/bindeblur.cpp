#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bindeblur/io.hpp"
#include "bindeblur/oracle.hpp"
#include "bindeblur/reconstruct.hpp"
#include "bindeblur/rng.hpp"
#include "bindeblur/stability.hpp"

namespace {

using namespace bindeblur;

constexpr int kExitRecovered = 0;
constexpr int kExitInconsistent = 2;
constexpr int kExitBudget = 3;
constexpr int kExitUnsupported = 4;
constexpr int kExitParse = 5;

int thread_cap() {
  const char* env = std::getenv("BINDEBLUR_THREADS");
  if (env == nullptr) return 1;
  const int v = std::atoi(env);
  return v >= 1 ? v : 1;
}

Band band_from_flag(const std::string& flag, int n1, int n2) {
  if (flag.empty()) return minimal_band(n1, n2);
  if (flag == "rect4") return Band::rect4();
  try {
    const int limit = std::stoi(flag);
    if (limit < 0) throw std::invalid_argument(flag);
    return Band::square(limit);
  } catch (const std::exception&) {
    throw CLI::ValidationError("--band", "expected an integer limit or 'rect4'");
  }
}

struct SolverFlags {
  double beta = 1e8;
  double epsilon = 0.001;
  double delta = 0.75;
  double lll_timeout = 5.0;
  long long node_limit = 10'000'000;
  double tolerance = 1e-6;
  double noise_floor = 0.0;
  bool retry_directions = false;

  void attach(CLI::App* app) {
    app->add_option("--noise-floor", noise_floor,
                    "Assumed standard deviation of the coefficient noise");
    app->add_option("--beta", beta, "Embedding weight on constraint rows");
    app->add_option("--epsilon", epsilon, "Residual acceptance tolerance for lattice solves");
    app->add_option("--delta", delta, "Lovasz parameter for basis reduction");
    app->add_option("--lll-timeout", lll_timeout, "Per-reduction time limit in seconds");
    app->add_option("--node-limit", node_limit, "Search node budget for feasibility solves");
    app->add_option("--tolerance", tolerance, "Per-row residual tolerance for feasibility");
    app->add_flag("--retry-directions", retry_directions,
                  "On an inconsistent stacked solve, drop recovered directions by "
                  "descending residual and retry");
  }

  SolverConfig config() const {
    SolverConfig cfg;
    cfg.beta = beta;
    cfg.epsilon = epsilon;
    cfg.delta = delta;
    cfg.time_limit = lll_timeout;
    cfg.noise_floor = noise_floor;
    return cfg;
  }

  SearchBudget budget() const {
    SearchBudget budget;
    budget.node_limit = node_limit;
    budget.tolerance = tolerance;
    return budget;
  }

  RecoveryOptions options() const {
    RecoveryOptions options;
    options.retry_directions = retry_directions;
    return options;
  }
};

int run_blur(const std::string& image_in, const std::string& coeff_out,
             const std::string& image_out, const std::string& band_flag, double noise,
             std::uint64_t seed) {
  const BinaryMatrix x = read_pbm_file(image_in);
  const Band band = band_from_flag(band_flag, x.n1(), x.n2());
  BandedSpectrum spec = band_extract(dft_forward(x), band);
  if (noise > 0.0) spec = add_noise(spec, noise, seed);
  write_coefficients_file(coeff_out, spec);
  if (!image_out.empty()) write_pgm_file(image_out, blur(spec));
  return 0;
}

int run_recover(const std::string& coeff_in, const std::string& image_out,
                const std::string& report_out, const SolverFlags& flags) {
  const BandedSpectrum spec = read_coefficients_file(coeff_in);
  spec.validate(std::max({kSymmetryTolerance, flags.tolerance, 10.0 * flags.noise_floor}));
  const RecoveryReport report = recover(spec, flags.config(), flags.budget(), flags.options());
  if (!report_out.empty()) write_report_file(report_out, report, spec.n1(), spec.n2());
  else write_report(std::cout, report, spec.n1(), spec.n2());
  switch (report.status) {
    case RecoveryStatus::Recovered:
      write_pbm_file(image_out, report.matrix);
      return kExitRecovered;
    case RecoveryStatus::BudgetExhausted:
      return kExitBudget;
    default:
      return kExitInconsistent;
  }
}

int run_trials(int n1, int n2, const std::string& band_flag, int popcount, int count,
               std::uint64_t seed, double noise, const std::string& table_out,
               const SolverFlags& flags) {
  const Band band = band_from_flag(band_flag, n1, n2);
  SolverFlags tuned = flags;
  if (noise > 0.0 && tuned.noise_floor == 0.0) {
    // Unless overridden, assume the solver should tolerate exactly the
    // injected noise level.
    tuned.noise_floor = std::sqrt(noise);
    tuned.tolerance = std::max(tuned.tolerance, 10.0 * tuned.noise_floor);
  }
  int successes = 0;
  double total_seconds = 0.0;
  double total_recovered_dirs = 0.0;
  (void)thread_cap();  // single-threaded trial loop; the cap is honored trivially

  for (int trial = 0; trial < count; ++trial) {
    const BinaryMatrix model = random_binary_matrix(n1, n2, popcount, mix_seed(seed, trial));
    BandedSpectrum spec = band_extract(dft_forward(model), band);
    if (noise > 0.0) spec = add_noise(spec, noise, mix_seed(seed ^ 0x5eedULL, trial));
    const RecoveryReport report =
        recover(spec, tuned.config(), tuned.budget(), tuned.options());
    if (report.status == RecoveryStatus::Recovered && report.matrix == model) ++successes;
    total_seconds += report.total_elapsed;
    for (const auto& d : report.per_direction)
      if (d.kind == DirectionalKind::ExactSums) total_recovered_dirs += 1.0;
  }

  std::ostringstream table;
  table << "schema 1\n";
  table << "dims " << n1 << " " << n2 << "\n";
  table << "band " << (band_flag.empty() ? std::string("minimal") : band_flag) << "\n";
  table << "popcount " << popcount << "\n";
  table << "trials " << count << "\n";
  table << "noise_variance " << noise << "\n";
  table << "successes " << successes << "\n";
  table << "success_rate " << (count > 0 ? static_cast<double>(successes) / count : 0.0)
        << "\n";
  table << "mean_elapsed_seconds " << (count > 0 ? total_seconds / count : 0.0) << "\n";
  table << "mean_directions_recovered "
        << (count > 0 ? total_recovered_dirs / count : 0.0) << "\n";
  if (table_out.empty()) {
    std::cout << table.str();
  } else {
    std::ofstream out(table_out);
    if (!out) throw ParseError(table_out + ": cannot open for writing");
    out << table.str();
  }
  return 0;
}

int run_gen(const std::string& kind, int n1, int n2, int p, int alpha, int popcount,
            std::uint64_t seed, const std::string& image_out) {
  BinaryMatrix x;
  if (kind == "random") {
    x = random_binary_matrix(n1, n2, popcount, seed);
  } else if (kind == "qr-like") {
    x = qr_like_fixture(n1, popcount, seed);
  } else if (kind == "checkerboard" || kind == "stripe") {
    const int pp = (kind == "checkerboard") ? (p > 0 ? p : 2) : p;
    const auto [a, b] = counterexample_pair(pp, alpha);
    x = a;
  } else {
    throw CLI::ValidationError("--kind", "expected random|qr-like|checkerboard|stripe");
  }
  write_pbm_file(image_out, x);
  return 0;
}

int run_audit(int n1, int n2, const std::string& band_flag, long long sampled,
              std::uint64_t seed) {
  const Band band = band_from_flag(band_flag, n1, n2);
  const AuditMode mode =
      sampled > 0 ? AuditMode::Sampled(sampled, seed) : AuditMode::Exhaustive();
  const UniquenessAudit audit = audit_uniqueness(n1, n2, band, mode);
  std::cout << "mode " << (mode.exhaustive ? "exhaustive" : "sampled") << "\n";
  std::cout << "collisions " << audit.collisions.size() << "\n";
  return audit.collisions.empty() ? 0 : kExitInconsistent;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact binary-matrix recovery from low-frequency DFT coefficients"};
  app.require_subcommand(1);

  // blur
  std::string blur_image_in, blur_coeff_out, blur_image_out, blur_band;
  double blur_noise = 0.0;
  std::uint64_t blur_seed = 0;
  CLI::App* blur_cmd = app.add_subcommand("blur", "Transform an image to banded coefficients");
  blur_cmd->add_option("image", blur_image_in, "Input bitmap (plain PBM)")->required();
  blur_cmd->add_option("coefficients", blur_coeff_out, "Output coefficient file")->required();
  blur_cmd->add_option("blurred", blur_image_out, "Optional blurred rendering (plain PGM)");
  blur_cmd->add_option("--band", blur_band, "Band limit L or 'rect4' (default: minimal)");
  blur_cmd->add_option("--noise", blur_noise, "Gaussian noise variance on the coefficients");
  blur_cmd->add_option("--seed", blur_seed, "Noise seed");

  // recover
  std::string rec_coeff_in, rec_image_out, rec_report_out;
  SolverFlags rec_flags;
  CLI::App* rec_cmd = app.add_subcommand("recover", "Recover the binary image");
  rec_cmd->add_option("coefficients", rec_coeff_in, "Input coefficient file")->required();
  rec_cmd->add_option("image", rec_image_out, "Output bitmap (plain PBM)")->required();
  rec_cmd->add_option("report", rec_report_out, "Optional report file (default: stdout)");
  rec_flags.attach(rec_cmd);

  // trials
  int tr_n1 = 0, tr_n2 = 0, tr_pop = 0, tr_count = 1;
  std::string tr_band, tr_table;
  std::uint64_t tr_seed = 0;
  double tr_noise = 0.0;
  SolverFlags tr_flags;
  CLI::App* tr_cmd = app.add_subcommand("trials", "Run a seeded recovery experiment");
  tr_cmd->add_option("--dims", [&tr_n1, &tr_n2](const CLI::results_t& res) {
    if (res.size() != 2) return false;
    tr_n1 = std::stoi(res[0]);
    tr_n2 = std::stoi(res[1]);
    return true;
  }, "Matrix dimensions N1 N2")->expected(2)->required();
  tr_cmd->add_option("--popcount", tr_pop, "Number of ones per model")->required();
  tr_cmd->add_option("--count", tr_count, "Number of trials")->check(CLI::PositiveNumber);
  tr_cmd->add_option("--band", tr_band, "Band limit L or 'rect4' (default: minimal)");
  tr_cmd->add_option("--seed", tr_seed, "Master seed");
  tr_cmd->add_option("--noise", tr_noise, "Gaussian noise variance");
  tr_cmd->add_option("--table", tr_table, "Output table file (default: stdout)");
  tr_flags.attach(tr_cmd);

  // stability
  int st_p = 0, st_k = 0, st_m = 0;
  CLI::App* st_cmd = app.add_subcommand("stability", "Digits-of-precision estimate");
  st_cmd->add_option("p", st_p, "Line count (prime)")->required();
  st_cmd->add_option("K", st_k, "Per-line capacity bound")->required();
  st_cmd->add_option("M", st_m, "Coefficient count")->required();

  // counts
  long long ct_s = 0;
  int ct_boxes = 0, ct_cap = 0;
  CLI::App* ct_cmd = app.add_subcommand("counts", "Bounded-composition count");
  ct_cmd->add_option("s", ct_s, "Total")->required();
  ct_cmd->add_option("boxes", ct_boxes, "Number of boxes")->required();
  ct_cmd->add_option("cap", ct_cap, "Per-box capacity")->required();

  // gen
  std::string gen_kind = "random", gen_out;
  int gen_n1 = 0, gen_n2 = 0, gen_p = 0, gen_alpha = 2, gen_pop = 0;
  std::uint64_t gen_seed = 0;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Generate a fixture image");
  gen_cmd->add_option("--kind", gen_kind, "random|qr-like|checkerboard|stripe");
  gen_cmd->add_option("--dims", [&gen_n1, &gen_n2](const CLI::results_t& res) {
    if (res.size() != 2) return false;
    gen_n1 = std::stoi(res[0]);
    gen_n2 = std::stoi(res[1]);
    return true;
  }, "Matrix dimensions N1 N2")->expected(2);
  gen_cmd->add_option("--p", gen_p, "Prime for counterexample kinds");
  gen_cmd->add_option("--alpha", gen_alpha, "Exponent for counterexample kinds");
  gen_cmd->add_option("--popcount", gen_pop, "Number of ones");
  gen_cmd->add_option("--seed", gen_seed, "Seed");
  gen_cmd->add_option("image", gen_out, "Output bitmap")->required();

  // audit
  int au_n1 = 0, au_n2 = 0;
  std::string au_band;
  long long au_sampled = 0;
  std::uint64_t au_seed = 0;
  CLI::App* au_cmd = app.add_subcommand("audit", "Uniqueness audit over a band");
  au_cmd->add_option("--dims", [&au_n1, &au_n2](const CLI::results_t& res) {
    if (res.size() != 2) return false;
    au_n1 = std::stoi(res[0]);
    au_n2 = std::stoi(res[1]);
    return true;
  }, "Matrix dimensions N1 N2")->expected(2)->required();
  au_cmd->add_option("--band", au_band, "Band limit L or 'rect4' (default: minimal)");
  au_cmd->add_option("--sampled", au_sampled, "Sampled mode with this many random pairs");
  au_cmd->add_option("--seed", au_seed, "Sampling seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (blur_cmd->parsed())
      return run_blur(blur_image_in, blur_coeff_out, blur_image_out, blur_band, blur_noise,
                      blur_seed);
    if (rec_cmd->parsed())
      return run_recover(rec_coeff_in, rec_image_out, rec_report_out, rec_flags);
    if (tr_cmd->parsed())
      return run_trials(tr_n1, tr_n2, tr_band, tr_pop, tr_count, tr_seed, tr_noise, tr_table,
                        tr_flags);
    if (st_cmd->parsed()) {
      const StabilityEstimate est = stability_estimate(st_p, st_k, st_m);
      std::cout << "nu " << est.nu_value << "\n";
      std::cout << "digits " << est.digits << "\n";
      std::cout << "digits_rounded " << digits_estimate_rounded(st_p, st_k, st_m) << "\n";
      return 0;
    }
    if (ct_cmd->parsed()) {
      std::cout << count_bounded_compositions(ct_s, ct_boxes, ct_cap) << "\n";
      return 0;
    }
    if (gen_cmd->parsed())
      return run_gen(gen_kind, gen_n1, gen_n2, gen_p, gen_alpha, gen_pop, gen_seed, gen_out);
    if (au_cmd->parsed()) return run_audit(au_n1, au_n2, au_band, au_sampled, au_seed);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const InvalidSpectrum& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const UnsupportedDims& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnsupported;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
