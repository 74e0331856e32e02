#pragma once

// CSV formats:
//   dense matrix : first line "rows,cols", then one row-major line per row
//   sparse set   : one "i,j,value" line per entry, 0-based indices
//   trajectory   : one state index per line

#include "lrsm/matops.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace lrsm::io {

// Shortest decimal text that round-trips the double.
std::string format_double(double x);

void write_dense(std::ostream& os, const DenseMatrix& m);
DenseMatrix read_dense(std::istream& is);
void save_dense(const std::string& path, const DenseMatrix& m);
DenseMatrix load_dense(const std::string& path);

void write_sparse(std::ostream& os, const SparseEntrySet& s);
SparseEntrySet read_sparse(std::istream& is, Index rows, Index cols);
void save_sparse(const std::string& path, const SparseEntrySet& s);
SparseEntrySet load_sparse(const std::string& path, Index rows, Index cols);

void write_states(std::ostream& os, const std::vector<std::int64_t>& states);
std::vector<std::int64_t> read_states(std::istream& is);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace lrsm::io
