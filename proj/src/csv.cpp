#include "xpa/csv.hpp"

#include "xpa/types.hpp"

#include <charconv>
#include <cstdlib>
#include <limits>
#include <istream>
#include <ostream>

namespace xpa::csv {

Reader::Reader(std::istream& in, std::string source_name) : in_(in), source_(std::move(source_name)) {}

void Reader::fail(std::size_t line, const std::string& msg) const
{
    throw InputError(source_ + ":" + std::to_string(line) + ": " + msg);
}

bool Reader::next(Row& row)
{
    row.fields.clear();
    std::string line;
    if (!std::getline(in_, line))
        return false;
    ++line_;
    row.line = line_;
    std::string field;
    bool quoted = false;
    std::size_t i = 0;
    while (true) {
        if (i == line.size()) {
            if (quoted) {
                // quoted field continues on the next physical line
                std::string more;
                if (!std::getline(in_, more))
                    fail(row.line, "unterminated quoted field");
                ++line_;
                field.push_back('\n');
                line = std::move(more);
                i = 0;
                continue;
            }
            break;
        }
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            row.fields.push_back(std::move(field));
            field.clear();
        } else if (ch != '\r') {
            field.push_back(ch);
        }
        ++i;
    }
    row.fields.push_back(std::move(field));
    if (!header_.empty() && row.fields.size() != header_.size())
        fail(row.line, "expected " + std::to_string(header_.size()) + " fields, got "
                           + std::to_string(row.fields.size()));
    return true;
}

void Reader::read_header(const std::vector<std::string>& required)
{
    Row row;
    if (!next(row))
        fail(1, "missing header");
    header_ = row.fields;
    for (std::size_t i = 0; i < header_.size(); ++i)
        index_[header_[i]] = i;
    for (const auto& col : required)
        if (!index_.count(col))
            fail(row.line, "missing column '" + col + "'");
}

const std::string& Reader::field(const Row& row, const std::string& column) const
{
    auto it = index_.find(column);
    if (it == index_.end())
        fail(row.line, "no column '" + column + "'");
    return row.fields[it->second];
}

std::string escape(const std::string& field)
{
    if (field.find_first_of(",\"\n\r") == std::string::npos)
        return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"')
            out += "\"\"";
        else
            out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

Writer& Writer::row(const std::vector<std::string>& fields)
{
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i)
            out_ << ',';
        out_ << escape(fields[i]);
    }
    out_ << '\n';
    return *this;
}

double parse_double(const std::string& s, const Reader& r, std::size_t line)
{
    if (s == "inf")
        return std::numeric_limits<double>::infinity();
    if (s == "nan")
        return std::numeric_limits<double>::quiet_NaN();
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        r.fail(line, "not a number: '" + s + "'");
    return v;
}

long long parse_int(const std::string& s, const Reader& r, std::size_t line)
{
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        r.fail(line, "not an integer: '" + s + "'");
    return v;
}

} // namespace xpa::csv
