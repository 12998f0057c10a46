#pragma once

#include "orthoshrink/montecarlo.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace orthoshrink {

// Sweep tables on disk. CSV uses 6 significant digits (plot-ready, matches
// the precision of the reference tables); JSON carries every field of the
// records at full double precision and is the lossless interchange format.

/// `sweep_value,estimator,frobenius,frobenius_se,eig1,...,eigP,eig_se1,...,eig_seP,reps,seed,rejects`
std::string sweep_csv_header(int p);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
/// Parses the tabular columns back; the mean/stderr matrices are not part of
/// the CSV schema and come back empty.
std::vector<SweepRow> read_sweep_csv(std::istream& in);

void write_sweep_json(std::ostream& out, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_sweep_json(std::istream& in);

/// `n,max_eig,max_eig_se,below_n,bound_ok,reps,seed,rejects`
std::string appendix_csv_header();

void write_appendix_csv(std::ostream& out, const std::vector<AppendixRow>& rows);
std::vector<AppendixRow> read_appendix_csv(std::istream& in);

void write_appendix_json(std::ostream& out, const std::vector<AppendixRow>& rows);
std::vector<AppendixRow> read_appendix_json(std::istream& in);

/// 6-significant-digit float formatting used by the CSV writers.
std::string csv_number(double v);

}  // namespace orthoshrink
