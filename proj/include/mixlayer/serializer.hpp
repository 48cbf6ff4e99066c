// Deterministic file output for tables, profiles, fields, and streamlines,
// plus golden-file comparison. Two formats share one document model:
//
//   CSV   leading '#' comment lines (kind first, then metadata sorted by
//         key), an RFC-4180 header row, data rows with 9 significant digits,
//         and an optional trailing '# termination=...' comment.
//   JSON  a single object {kind, metadata, columns[, termination]} with
//         canonically sorted keys; non-finite values become null and are
//         flagged in the metadata.
//
// Identical documents serialize to byte-identical files in both formats.
#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mixlayer/core_types.hpp"

namespace mixlayer::io {

enum class DocKind { Table, Profile, Field, Streamlines, Report };

const char* doc_kind_name(DocKind kind);
DocKind doc_kind_from_name(std::string_view name);  // InvalidDoc on no match

struct Column {
  std::string name;
  std::vector<double> values;
};

struct OutputDoc {
  DocKind kind = DocKind::Table;
  std::vector<Column> columns;  // written in this order
  // Reproducibility metadata (parameters, tolerances, versions). Values must
  // be single-line; newlines are replaced by spaces on write.
  std::map<std::string, std::string> metadata;
  // Optional trailing comment payload, e.g. "pole tau_p=3.62759873"; written
  // as the final CSV line "# termination=<payload>".
  std::string termination_comment;

  std::size_t rows() const;
  const Column* find(std::string_view name) const;
  void add_column(std::string name, std::vector<double> values);
  // InvalidDoc on an empty column set, unequal column lengths, duplicate or
  // empty column names.
  void validate() const;
};

// 9-significant-digit general formatting ("nan", "inf", "-inf" pass through).
std::string format_value(double v);

void write_csv(const OutputDoc& doc, const std::string& path);
void write_json(const OutputDoc& doc, const std::string& path);

// Read-back of the formats above. CSV values parse "nan"/"inf"; JSON nulls
// read back as NaN. JSON column order is the canonical (sorted) key order.
OutputDoc read_csv(const std::string& path);
OutputDoc read_json(const std::string& path);

// A column passes when every row satisfies |p-g| <= abs OR relative
// deviation <= rel (relative to max(|p|, |g|)).
struct ColumnTolerance {
  double abs = 0.0;
  double rel = 0.0;
};

struct ColumnDeviation {
  std::string name;
  double max_abs = 0.0;
  double max_rel = 0.0;
  std::size_t worst_row = 0;  // row of max_abs
  bool pass = true;
};

struct GoldenReport {
  bool pass = true;
  std::vector<ColumnDeviation> columns;  // produced-document order
  std::string message;  // names the first failing column and row, or "ok"
};

// Compares `produced` against a stored golden file (.json dispatches to the
// JSON reader, anything else to CSV). Columns without an entry in
// `tolerances` use `fallback`. Errors: IoError with regeneration guidance
// when the golden file is missing; SchemaMismatch when column names or row
// counts differ.
GoldenReport compare_golden(
    const OutputDoc& produced, const std::string& golden_path,
    const std::map<std::string, ColumnTolerance>& tolerances,
    ColumnTolerance fallback = {});

}  // namespace mixlayer::io
