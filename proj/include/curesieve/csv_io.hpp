#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "curesieve/inference.hpp"
#include "curesieve/simulate.hpp"

namespace curesieve {

/// Shortest round-trip decimal representation, locale independent.
std::string format_double(double x);

struct CsvDataset {
  Dataset data;
  std::vector<std::string> covariate_names;
};

/// Reads the subject schema `entry,status,time1,time2,<covariates...>`.
/// status is one of exact/interval/right; time2 must be present exactly for
/// interval rows. Throws ParseError carrying the offending line number.
CsvDataset read_dataset_csv(std::istream& in, double tau);
CsvDataset read_dataset_csv_file(const std::string& path, double tau);

void write_dataset_csv(std::ostream& out, const Dataset& data,
                       const std::vector<std::string>& covariate_names = {});

void write_estimates_csv(std::ostream& out,
                         const std::vector<std::string>& covariate_names,
                         const std::vector<CiRow>& rows);

struct FunctionalRow {
  double q = 0.0, t = 0.0, estimate = 0.0, se = 0.0;
};
void write_functionals_csv(std::ostream& out,
                           const std::vector<FunctionalRow>& rows);

void write_hazard_csv(std::ostream& out, const std::vector<double>& ts,
                      const std::vector<double>& values);

void write_mc_summary_csv(std::ostream& out, const McSummary& summary);

void write_hazard_curve_csv(std::ostream& out,
                            const std::vector<HazardCurvePoint>& points);

}  // namespace curesieve
