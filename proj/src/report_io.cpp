#include "condfield/report_io.hpp"

#include <cstdio>

#include "condfield/detail/spec_table.hpp"

namespace condfield {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string jstr(const std::string& s) { return "\"" + json_escape(s) + "\""; }

}  // namespace

ReportWriter::ReportWriter(std::ostream& os, std::string format)
    : os_(os), json_(format == "json") {}

void ReportWriter::header(const std::string& command, const std::string& model_path,
                          const RunConfig& cfg) {
  if (json_) {
    os_ << "{\"tool\":" << jstr(std::string(kToolName)) << ",\"version\":"
        << jstr(std::string(kToolVersion)) << ",\"command\":" << jstr(command)
        << ",\"model\":" << jstr(model_path) << ",\"seed\":" << cfg.seed
        << ",\"tolerance_eq\":" << format_double(cfg.tol_eq)
        << ",\"tolerance_norm\":" << format_double(cfg.tol_norm)
        << ",\"budget\":" << cfg.budget << "}\n";
  } else {
    os_ << "# " << kToolName << ' ' << kToolVersion << ' ' << command << " model=" << model_path
        << " seed=" << cfg.seed << " tol_eq=" << format_double(cfg.tol_eq)
        << " tol_norm=" << format_double(cfg.tol_norm) << " budget=" << cfg.budget << '\n';
  }
}

void ReportWriter::report(const Report& r) {
  if (json_) {
    os_ << "{\"check\":" << jstr(r.check_name) << ",\"passed\":" << (r.passed ? "true" : "false")
        << ",\"worst_violation\":" << format_double(r.worst_violation)
        << ",\"tolerance\":" << format_double(r.tolerance) << ",\"count\":" << r.count_checked
        << ",\"sampled\":" << (r.sampled ? "true" : "false");
    if (r.witness) os_ << ",\"witness\":" << jstr(*r.witness);
    if (!r.note.empty()) os_ << ",\"note\":" << jstr(r.note);
    os_ << "}\n";
  } else {
    os_ << (r.passed ? "PASS " : "FAIL ") << r.check_name
        << " worst=" << format_double(r.worst_violation) << " tol=" << format_double(r.tolerance)
        << " checked=" << r.count_checked;
    if (r.sampled) os_ << " sampled";
    if (r.witness) os_ << " witness=" << *r.witness;
    if (!r.note.empty()) os_ << " note=" << r.note;
    os_ << '\n';
  }
}

void ReportWriter::value_line(const std::string& key,
                              const std::vector<std::pair<std::string, std::string>>& fields) {
  if (json_) {
    os_ << "{\"value\":" << jstr(key);
    for (const auto& [name, val] : fields) {
      os_ << ',' << jstr(name) << ':' << jstr(val);
    }
    os_ << "}\n";
  } else {
    os_ << "VALUE " << key;
    for (const auto& [name, val] : fields) {
      os_ << ' ' << name << '=' << val;
    }
    os_ << '\n';
  }
}

void ReportWriter::summary(int exit_code, int checks, int failures, bool sampled_any) {
  if (json_) {
    os_ << "{\"summary\":{\"exit_code\":" << exit_code << ",\"checks\":" << checks
        << ",\"failures\":" << failures << ",\"sampled_any\":" << (sampled_any ? "true" : "false")
        << "}}\n";
  } else {
    os_ << "SUMMARY exit=" << exit_code << " checks=" << checks << " failures=" << failures
        << " sampled=" << (sampled_any ? "true" : "false") << '\n';
  }
}

namespace {

void write_table_impl(std::ostream& os, const detail::SpecTable& tab, const std::string& system) {
  const detail::MasterIndex& idx = tab.idx;
  os << "{\"spec\":" << jstr(system) << ",\"tool\":" << jstr(std::string(kToolName))
     << ",\"version\":" << jstr(std::string(kToolVersion)) << ",\"sites\":" << idx.sites()
     << ",\"alphabet\":[";
  for (std::size_t i = 0; i < idx.alphabet().size(); ++i) {
    if (i) os << ',';
    os << format_double(idx.alphabet().symbol(i));
  }
  os << "],\"keys\":" << tab.key_count() << "}\n";

  for (const auto& [v, s] : tab.sorted_keys()) {
    const detail::Block* b = tab.find(v, s);
    const Window vw = idx.window_of(v);
    for (std::uint64_t z = 0; z < b->nz; ++z) {
      os << "{\"V\":[";
      for (std::size_t i = 0; i < vw.size(); ++i) {
        if (i) os << ',';
        os << '[';
        for (std::size_t c = 0; c < vw.point(i).coords().size(); ++c) {
          if (c) os << ',';
          os << vw.point(i).coord(c);
        }
        os << ']';
      }
      os << "],\"z\":" << jstr(idx.describe_config(s, z)) << ",\"p\":[";
      for (std::uint64_t x = 0; x < b->nx; ++x) {
        if (x) os << ',';
        os << format_double(b->at(z, x));
      }
      os << "]}\n";
    }
  }
}

}  // namespace

void write_spec_table(std::ostream& os, const FSpec& spec, const std::string& system) {
  write_table_impl(os, spec.table(), system);
}
void write_spec_table(std::ostream& os, const OneFSpec& spec, const std::string& system) {
  write_table_impl(os, spec.table(), system);
}
void write_spec_table(std::ostream& os, const PalmSpec& spec, const std::string& system) {
  write_table_impl(os, spec.table(), system);
}
void write_spec_table(std::ostream& os, const DSpecFinite& spec, const std::string& system) {
  write_table_impl(os, spec.table(), system);
}

void write_rho_matrix(ReportWriter& w, const RhoMatrix& rho) {
  const std::size_t n = rho.master.size();
  for (std::size_t t = 0; t < n; ++t) {
    std::string row;
    for (std::size_t s = 0; s < n; ++s) {
      if (s) row += ' ';
      row += format_double(t == s ? 0.0 : rho.value(t, s));
    }
    w.value_line("rho_row", {{"t", rho.master.point(t).to_string()}, {"values", row}});
  }
}

}  // namespace condfield
