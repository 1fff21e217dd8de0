#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "frame.hpp"

namespace roadfirst {

// RFC-4180 records: quoted fields, doubled quotes, CRLF line ends,
// embedded newlines inside quoted fields. UTF-8 passes through untouched.
std::vector<std::vector<std::string>> read_csv_records(std::istream& in);
std::vector<std::vector<std::string>> read_csv_records(const std::filesystem::path& path);

std::string csv_escape(const std::string& field);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

// Canonical numeric formatting: shortest round-trip representation, so a
// write/reload cycle reproduces values bit-for-bit.
std::string format_double(double v);
double parse_double(const std::string& cell, std::size_t row, const std::string& column);

// Ingest a CSV file against a schema. The header must contain exactly the
// schema's column names (any order). Categorical level lists left empty in
// the schema are collected from the data (sorted distinct observed values).
Frame load_csv(const std::filesystem::path& path, const Schema& schema);

// Write a frame back out, schema column order, header row first.
void write_frame_csv(const Frame& frame, const std::filesystem::path& path);

// Convenience pair used by the pipeline: <name>.csv + <name>.schema.json.
std::filesystem::path sibling_schema_path(const std::filesystem::path& csv_path);
Frame load_frame_bundle(const std::filesystem::path& csv_path,
                        const std::filesystem::path& schema_path = {});
void save_frame_bundle(const Frame& frame, const std::filesystem::path& csv_path);

}  // namespace roadfirst
