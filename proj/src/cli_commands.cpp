#include "condfield/cli.hpp"

#include <fstream>

#include "condfield/analysis.hpp"
#include "condfield/consistency.hpp"
#include "condfield/reconstruct.hpp"
#include "condfield/report_io.hpp"

namespace condfield {

namespace {

struct Collector {
  std::vector<Report> reports;

  void add(Report r) { reports.push_back(std::move(r)); }
  void add(std::vector<Report> rs) {
    for (auto& r : rs) reports.push_back(std::move(r));
  }
  int failures() const {
    int f = 0;
    for (const auto& r : reports) f += r.passed ? 0 : 1;
    return f;
  }
  bool sampled_any() const {
    for (const auto& r : reports) {
      if (r.sampled) return true;
    }
    return false;
  }
};

int emit(ReportWriter& w, const Collector& col, int exit_code_on_fail = kExitCheckFailed) {
  const int failures = col.failures();
  const int code = failures ? exit_code_on_fail : kExitOk;
  for (const auto& r : col.reports) w.report(r);
  w.summary(code, static_cast<int>(col.reports.size()), failures, col.sampled_any());
  return code;
}

bool system_requested(const std::string& requested, const std::string& name) {
  return requested == "all" || requested == name;
}

bool perturb_applies(const PerturbSpec& p, const std::string& name) {
  return p.enabled && (p.system.empty() || p.system == name);
}

ReconstructOptions reconstruct_options(const RunConfig& cfg) {
  ReconstructOptions o;
  o.tol.eq = cfg.tol_eq;
  o.tol.norm = cfg.tol_norm;
  o.seed = cfg.seed;
  return o;
}

Report reconstruct_failure(const std::string& name, const std::string& what) {
  Report r;
  r.check_name = name;
  r.passed = false;
  r.worst_violation = 1.0;
  r.tolerance = 0.0;
  r.witness = what;
  return r;
}

double max_joint_deviation(const FiniteField& a, const FiniteField& b) {
  double dev = 0.0;
  for (std::size_t i = 0; i < a.joint().table().size(); ++i) {
    dev = std::max(dev, std::abs(a.joint().table()[i] - b.joint().table()[i]));
  }
  return dev;
}

}  // namespace

int cmd_validate(const ModelFile& model, const std::string& system, const RunConfig& cfg,
                 std::ostream& os, const std::string& dump_path) {
  ReportWriter w(os, cfg.format);
  w.header("validate", model.origin, cfg);
  const FiniteField field = model.build_field(cfg);
  const CheckOptions opts = cfg.check_options();
  Collector col;

  std::ofstream dump;
  if (!dump_path.empty()) {
    dump.open(dump_path);
    if (!dump) throw ParseError("cannot open dump path " + dump_path);
  }

  if (system_requested(system, "f")) {
    FSpec q = fspec_from_field(field);
    if (perturb_applies(model.perturb, "f")) {
      q = perturbed(q, model.perturb.seed, model.perturb.delta);
    }
    if (dump.is_open()) write_spec_table(dump, q, "f");
    col.add(positivity_check(q, opts));
    col.add(check_fspec(q, opts));
    col.add(check_fspec_derived(q, opts));
  }
  if (system_requested(system, "1f")) {
    OneFSpec q = onefspec_from_field(field);
    if (perturb_applies(model.perturb, "1f")) {
      q = perturbed(q, model.perturb.seed, model.perturb.delta);
    }
    if (dump.is_open()) write_spec_table(dump, q, "1f");
    col.add(positivity_check(q, opts));
    col.add(check_1fspec(q, opts));
    col.add(check_1f_derived(q, opts));
  }
  if (system_requested(system, "palm")) {
    PalmSpec q = palm_from_field(field);
    if (perturb_applies(model.perturb, "palm")) {
      q = perturbed(q, model.perturb.seed, model.perturb.delta);
    }
    if (dump.is_open()) write_spec_table(dump, q, "palm");
    col.add(positivity_check(q, opts));
    col.add(check_palm(q, opts));
  }
  if (system_requested(system, "d") || system_requested(system, "1d")) {
    DSpecFinite q = dspec_from_field(field);
    if (perturb_applies(model.perturb, "d") || perturb_applies(model.perturb, "1d")) {
      q = perturbed(q, model.perturb.seed, model.perturb.delta);
    }
    if (system_requested(system, "d")) {
      if (dump.is_open()) write_spec_table(dump, q, "d");
      col.add(positivity_check(q, opts));
      col.add(check_dspec(q, opts));
      col.add(check_dspec_equivalent(q, opts));
    }
    if (system_requested(system, "1d")) {
      col.add(check_1dspec(q, opts));
    }
  }
  return emit(w, col);
}

int cmd_reconstruct(const ModelFile& model, const std::string& via, const RunConfig& cfg,
                    std::ostream& os) {
  ReportWriter w(os, cfg.format);
  w.header("reconstruct", model.origin, cfg);
  const FiniteField field = model.build_field(cfg);
  const ReconstructOptions ropts = reconstruct_options(cfg);
  Collector col;

  ReconstructionInfo info;
  try {
    FiniteField rebuilt = [&] {
      if (via == "f") return field_from_fspec(fspec_from_field(field), ropts, &info);
      if (via == "1f") return field_from_1fspec(onefspec_from_field(field), ropts, &info);
      if (via == "palm") return field_from_palm(palm_from_field(field), ropts, &info);
      throw ParseError("unknown reconstruction route '" + via + "'");
    }();

    Report r;
    r.check_name = "reconstruct_roundtrip_" + via;
    r.tolerance = cfg.tol_eq;
    r.worst_violation = max_joint_deviation(field, rebuilt);
    r.count_checked = field.joint().table().size();
    r.sampled = info.verification_sampled;
    r.passed = r.worst_violation <= r.tolerance;
    r.note = "probe_spread=" + format_double(info.probe_spread) +
             " norm_defect=" + format_double(info.norm_defect) +
             " probes=" + std::to_string(info.probes_checked);
    if (!r.passed) r.witness = "joint deviation " + format_double(r.worst_violation);
    col.add(r);
  } catch (const ReconstructError& e) {
    col.add(reconstruct_failure("reconstruct_roundtrip_" + via, e.what()));
  }
  return emit(w, col);
}

int cmd_lift(const ModelFile& model, const std::string& route, const RunConfig& cfg,
             std::ostream& os) {
  ReportWriter w(os, cfg.format);
  w.header("lift", model.origin, cfg);
  const FiniteField field = model.build_field(cfg);
  const CheckOptions opts = cfg.check_options();
  const ReconstructOptions ropts = reconstruct_options(cfg);
  Collector col;

  try {
    FSpec lifted = [&] {
      if (route == "1f_product") return lift_1f_to_f_product(onefspec_from_field(field), ropts);
      if (route == "1f_ratio") return lift_1f_to_f_ratio(onefspec_from_field(field), ropts);
      if (route == "palm") return lift_palm_to_f(palm_from_field(field), ropts);
      throw ParseError("unknown lift route '" + route + "'");
    }();

    col.add(check_fspec(lifted, opts));

    const FSpec truth = fspec_from_field(field);
    double dev = 0.0;
    for (const auto& [v, s] : truth.table().sorted_keys()) {
      const auto* bt = truth.table().find(v, s);
      const auto* bl = lifted.table().find(v, s);
      if (!bl) {
        dev = 1.0;
        break;
      }
      for (std::size_t i = 0; i < bt->p.size(); ++i) {
        dev = std::max(dev, std::abs(bt->p[i] - bl->p[i]));
      }
    }
    Report r;
    r.check_name = "lift_vs_ground_truth_" + route;
    r.tolerance = cfg.tol_eq;
    r.worst_violation = dev;
    r.count_checked = truth.entry_count();
    r.passed = dev <= r.tolerance;
    if (!r.passed) r.witness = "max entry deviation " + format_double(dev);
    col.add(r);
  } catch (const ReconstructError& e) {
    col.add(reconstruct_failure("lift_" + route, e.what()));
  }
  return emit(w, col);
}

int cmd_analyze(const ModelFile& model, const std::string& what, const RunConfig& cfg,
                std::ostream& os) {
  ReportWriter w(os, cfg.format);
  w.header("analyze", model.origin, cfg);
  const FiniteField field = model.build_field(cfg);
  const NeighborhoodSystem nb = model.neighborhood();
  const CheckOptions opts = cfg.check_options();
  Collector col;

  if (what == "markov") {
    const OneFSpec q1 = onefspec_from_field(field);
    const FSpec qf = fspec_from_field(field);
    col.add(is_markov_1f(q1, nb, opts));
    col.add(is_markov_fspec(qf, nb, opts));
    col.add(markov_lift_preservation(q1, nb, opts));
    col.add(markov_equivalence_check(field, nb, opts));
    return emit(w, col);
  }
  if (what == "mixing") {
    const RhoMatrix rho = mixing_rho_matrix(field, opts);
    write_rho_matrix(w, rho);
    col.add(mixing_bound_sweep(field, opts));
    return emit(w, col);
  }
  if (what == "dobrushin") {
    double worst = 0.0;
    bool sampled_any = false;
    for (const LatticePoint& t : field.master()) {
      bool sampled = false;
      const double c = dobrushin_coefficient(field, t, opts, &sampled);
      sampled_any |= sampled;
      worst = std::max(worst, c);
      w.value_line("dobrushin_coefficient",
                   {{"t", t.to_string()},
                    {"value", format_double(c)},
                    {"mode", sampled ? "sampled-lower-bound" : "exact"}});
    }
    w.value_line("dobrushin_max", {{"value", format_double(worst)},
                                   {"volume", "finite"},
                                   {"mode", sampled_any ? "sampled-lower-bound" : "exact"}});
    w.summary(kExitOk, 0, 0, sampled_any);
    return kExitOk;
  }
  if (what == "sullivan") {
    col.add(sullivan_check(field, opts));
    return emit(w, col);
  }
  throw ParseError("unknown analysis '" + what + "'");
}

}  // namespace condfield
