#include "curesieve/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "curesieve/errors.hpp"

namespace curesieve {

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) {
      out.push_back(trim(line.substr(pos)));
      break;
    }
    out.push_back(trim(line.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

double parse_double(const std::string& field, int line, const char* what) {
  const char* b = field.data();
  const char* e = b + field.size();
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(b, e, value);
  if (ec != std::errc() || ptr != e || !std::isfinite(value))
    throw ParseError(line, std::string("cannot parse ") + what + " from '" +
                               field + "'");
  return value;
}

}  // namespace

CsvDataset read_dataset_csv(std::istream& in, double tau) {
  if (!(tau > 0.0)) throw ParseError(0, "tau must be positive");
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw ParseError(1, "no records");
  ++line_no;
  const auto header = split_fields(line);
  if (header.size() < 5 || header[0] != "entry" || header[1] != "status" ||
      header[2] != "time1" || header[3] != "time2")
    throw ParseError(
        1, "header must be entry,status,time1,time2,<covariate columns>");
  CsvDataset out;
  out.covariate_names.assign(header.begin() + 4, header.end());
  const int d = static_cast<int>(out.covariate_names.size());
  out.data.tau = tau;
  out.data.d = d;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (static_cast<int>(fields.size()) != 4 + d)
      throw ParseError(line_no, "expected " + std::to_string(4 + d) +
                                    " fields, got " +
                                    std::to_string(fields.size()));
    Subject s;
    s.entry = parse_double(fields[0], line_no, "entry");
    const std::string& status = fields[1];
    const bool has_time2 = !fields[3].empty();
    if (status == "exact") {
      s.status = Status::Exact;
      s.time1 = parse_double(fields[2], line_no, "time1");
      if (has_time2)
        throw ParseError(line_no, "time2 must be empty for exact rows");
    } else if (status == "interval") {
      s.status = Status::Interval;
      s.time1 = parse_double(fields[2], line_no, "time1");
      if (!has_time2)
        throw ParseError(line_no, "time2 is required for interval rows");
      s.time2 = parse_double(fields[3], line_no, "time2");
    } else if (status == "right") {
      s.status = Status::Right;
      s.time1 = parse_double(fields[2], line_no, "time1");
      if (has_time2)
        throw ParseError(line_no, "time2 must be empty for right rows");
    } else {
      throw ParseError(line_no, "unknown status '" + status +
                                    "' (expected exact, interval or right)");
    }
    s.z.resize(d);
    for (int k = 0; k < d; ++k)
      s.z[k] = parse_double(fields[4 + k], line_no, "covariate");
    out.data.subjects.push_back(std::move(s));
    const int i = out.data.n() - 1;
    try {
      Dataset one{{out.data.subjects[i]}, tau, d};
      validate(one);
    } catch (const DataError& err) {
      throw ParseError(line_no, err.what());
    }
  }
  if (out.data.subjects.empty()) throw ParseError(line_no, "no records");
  return out;
}

CsvDataset read_dataset_csv_file(const std::string& path, double tau) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open '" + path + "'");
  return read_dataset_csv(in, tau);
}

void write_dataset_csv(std::ostream& out, const Dataset& data,
                       const std::vector<std::string>& covariate_names) {
  out << "entry,status,time1,time2";
  for (int k = 0; k < data.d; ++k) {
    if (k < static_cast<int>(covariate_names.size()))
      out << ',' << covariate_names[k];
    else
      out << ",z" << (k + 1);
  }
  out << '\n';
  for (const Subject& s : data.subjects) {
    out << format_double(s.entry) << ',';
    switch (s.status) {
      case Status::Exact:
        out << "exact," << format_double(s.time1) << ',';
        break;
      case Status::Interval:
        out << "interval," << format_double(s.time1) << ','
            << format_double(s.time2);
        break;
      case Status::Right:
        out << "right," << format_double(s.time1) << ',';
        break;
    }
    for (int k = 0; k < data.d; ++k) out << ',' << format_double(s.z[k]);
    out << '\n';
  }
}

void write_estimates_csv(std::ostream& out,
                         const std::vector<std::string>& covariate_names,
                         const std::vector<CiRow>& rows) {
  out << "covariate,estimate,se,p_value\n";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const std::string name = k < covariate_names.size()
                                 ? covariate_names[k]
                                 : "z" + std::to_string(k + 1);
    out << name << ',' << format_double(rows[k].estimate) << ','
        << format_double(rows[k].se) << ',' << format_double(rows[k].p_value)
        << '\n';
  }
}

void write_functionals_csv(std::ostream& out,
                           const std::vector<FunctionalRow>& rows) {
  out << "q,t,estimate,se\n";
  for (const auto& r : rows)
    out << format_double(r.q) << ',' << format_double(r.t) << ','
        << format_double(r.estimate) << ',' << format_double(r.se) << '\n';
}

void write_hazard_csv(std::ostream& out, const std::vector<double>& ts,
                      const std::vector<double>& values) {
  out << "t,hazard\n";
  for (std::size_t i = 0; i < ts.size(); ++i)
    out << format_double(ts[i]) << ',' << format_double(values[i]) << '\n';
}

void write_mc_summary_csv(std::ostream& out, const McSummary& summary) {
  out << "target,truth,mean,sd,mean_se,coverage,n_reps,n_converged\n";
  for (const McRow& r : summary.rows)
    out << r.target << ',' << format_double(r.truth) << ','
        << format_double(r.mean) << ',' << format_double(r.sd) << ','
        << format_double(r.mean_se) << ',' << format_double(r.coverage) << ','
        << summary.n_reps << ',' << summary.n_converged << '\n';
}

void write_hazard_curve_csv(std::ostream& out,
                            const std::vector<HazardCurvePoint>& points) {
  out << "t,true_hazard,mean_fitted_hazard\n";
  for (const auto& p : points)
    out << format_double(p.t) << ',' << format_double(p.true_hazard) << ','
        << format_double(p.mean_fitted) << '\n';
}

}  // namespace curesieve
