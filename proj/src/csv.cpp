#include "csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "errors.hpp"

namespace roadfirst {

std::vector<std::vector<std::string>> read_csv_records(std::istream& in) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> current;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;

    auto end_field = [&] {
        current.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(current));
        current.clear();
    };

    char ch;
    while (in.get(ch)) {
        if (in_quotes) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    in.get();
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(ch);
            }
            continue;
        }
        switch (ch) {
            case '"':
                if (field.empty() && !field_started) {
                    in_quotes = true;
                    field_started = true;
                } else {
                    field.push_back(ch);  // stray quote mid-field, keep verbatim
                }
                break;
            case ',':
                end_field();
                break;
            case '\r':
                if (in.peek() == '\n') in.get();
                end_record();
                break;
            case '\n':
                end_record();
                break;
            default:
                field.push_back(ch);
                field_started = true;
                break;
        }
    }
    if (in_quotes) throw ParseError("unterminated quoted field at end of CSV input");
    if (field_started || !field.empty() || !current.empty()) end_record();
    return records;
}

std::vector<std::vector<std::string>> read_csv_records(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open CSV file: " + path.string());
    return read_csv_records(in);
}

std::string csv_escape(const std::string& field) {
    const bool needs_quote = field.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quote) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.put(',');
        out << csv_escape(fields[i]);
    }
    out.put('\n');
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw NumericError("failed to format double");
    return std::string(buf, ptr);
}

double parse_double(const std::string& cell, std::size_t row, const std::string& column) {
    double v = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    // tolerate surrounding spaces
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end)
        throw ParseError("unparseable numeric cell '" + cell + "' at row " + std::to_string(row) +
                         ", column '" + column + "'");
    return v;
}

Frame load_csv(const std::filesystem::path& path, const Schema& schema) {
    schema.validate();
    auto records = read_csv_records(path);
    if (records.empty()) throw ParseError("CSV file has no header row: " + path.string());

    const auto& header = records.front();
    // Both directions must agree: every schema column present, no extras.
    std::vector<std::size_t> file_col_of(schema.size());
    for (std::size_t s = 0; s < schema.size(); ++s) {
        const auto& name = schema.at(s).name;
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw SchemaError("CSV file " + path.string() + " is missing column '" + name + "'");
        file_col_of[s] = static_cast<std::size_t>(it - header.begin());
    }
    for (const auto& h : header) {
        if (!schema.contains(h))
            throw SchemaError("CSV file " + path.string() + " has column '" + h +
                              "' absent from the schema");
    }
    std::set<std::string> header_set(header.begin(), header.end());
    if (header_set.size() != header.size())
        throw SchemaError("CSV file " + path.string() + " has duplicate header columns");

    Frame frame{schema};
    const std::size_t n = records.size() - 1;
    frame.set_row_count(n);

    for (std::size_t s = 0; s < schema.size(); ++s) {
        const auto& spec = schema.at(s);
        const std::size_t fc = file_col_of[s];
        for (std::size_t r = 0; r < n; ++r) {
            const auto& rec = records[r + 1];
            if (rec.size() != header.size())
                throw ParseError("row " + std::to_string(r + 1) + " has " + std::to_string(rec.size()) +
                                 " fields, expected " + std::to_string(header.size()) + " in " +
                                 path.string());
            const std::string& cell = rec[fc];
            if (is_text_role(spec.role)) {
                frame.text(s)[r] = cell;
            } else if (cell.empty()) {
                frame.num(s)[r] = std::numeric_limits<double>::quiet_NaN();
            } else {
                const double v = parse_double(cell, r + 1, spec.name);
                if ((spec.role == ColumnRole::Binary || spec.role == ColumnRole::Target) && v != 0.0 &&
                    v != 1.0)
                    throw ParseError("binary column '" + spec.name + "' has value '" + cell +
                                     "' at row " + std::to_string(r + 1));
                frame.num(s)[r] = v;
            }
        }
    }

    // Collect categorical levels not pre-declared: sorted distinct observed.
    for (std::size_t s = 0; s < schema.size(); ++s) {
        auto& spec = frame.mutable_schema().at(s);
        if (spec.role != ColumnRole::Categorical) continue;
        if (spec.levels.empty()) {
            std::set<std::string> observed;
            for (const auto& v : frame.text(s))
                if (!Frame::missing(v)) observed.insert(v);
            spec.levels.assign(observed.begin(), observed.end());
        } else {
            for (std::size_t r = 0; r < n; ++r) {
                const auto& v = frame.text(s)[r];
                if (!Frame::missing(v) &&
                    std::find(spec.levels.begin(), spec.levels.end(), v) == spec.levels.end())
                    throw ParseError("categorical column '" + spec.name + "' has undeclared level '" +
                                     v + "' at row " + std::to_string(r + 1));
            }
        }
    }

    frame.validate(/*allow_missing=*/true);
    return frame;
}

void write_frame_csv(const Frame& frame, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write CSV file: " + path.string());

    std::vector<std::string> fields;
    fields.reserve(frame.cols());
    for (const auto& c : frame.schema().columns()) fields.push_back(c.name);
    write_csv_row(out, fields);

    for (std::size_t r = 0; r < frame.rows(); ++r) {
        fields.clear();
        for (std::size_t c = 0; c < frame.cols(); ++c) {
            if (frame.is_text(c)) {
                fields.push_back(frame.text(c)[r]);
            } else {
                const double v = frame.num(c)[r];
                fields.push_back(Frame::missing(v) ? std::string{} : format_double(v));
            }
        }
        write_csv_row(out, fields);
    }
    if (!out) throw IoError("failed while writing CSV file: " + path.string());
}

std::filesystem::path sibling_schema_path(const std::filesystem::path& csv_path) {
    std::filesystem::path p = csv_path;
    p.replace_extension();
    p += ".schema.json";
    return p;
}

Frame load_frame_bundle(const std::filesystem::path& csv_path, const std::filesystem::path& schema_path) {
    const auto sp = schema_path.empty() ? sibling_schema_path(csv_path) : schema_path;
    return load_csv(csv_path, Schema::load(sp));
}

void save_frame_bundle(const Frame& frame, const std::filesystem::path& csv_path) {
    write_frame_csv(frame, csv_path);
    frame.schema().save(sibling_schema_path(csv_path));
}

}  // namespace roadfirst
