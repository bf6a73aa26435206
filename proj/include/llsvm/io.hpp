#ifndef LLSVM_IO_HPP
#define LLSVM_IO_HPP

#include <optional>
#include <string>
#include <vector>

#include "llsvm/dataset.hpp"

namespace llsvm {

enum class DataFormat { DenseCsv, Sparse };

// Dense CSV: label,feat1,...,featd per line. Labels may be -1/+1 or 0/1
// (0 maps to -1). Blank lines and '#' comments are skipped; a first
// non-numeric line is treated as a header. Sparse: "label idx:val ..." with
// 1-based indices; the dimension is the largest index seen.
// Errors carry the offending line number.
LabeledDataset parse_dataset(const std::string& path, DataFormat format);

// Dense CSV with %.17g coordinates; optional '#'-prefixed comment first.
void write_dataset(const std::string& path, const LabeledDataset& data,
                   const std::string& comment = "");

// Query points: rows of `dim` numeric columns, or `dim`+1 columns where the
// first is a -1/+1/0/1 label (returned separately). Mixing widths is an error.
struct QuerySet {
    std::vector<double> points;  // row-major, count x dim
    std::vector<int> labels;     // empty when the file had no label column
    std::size_t count = 0;
};

QuerySet read_query_points(const std::string& path, int dim);

// %.17g, the shortest form that round-trips a double here.
std::string format_double(double v);

} // namespace llsvm

#endif
