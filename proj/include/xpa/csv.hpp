#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace xpa::csv {

// RFC 4180 style: comma separated, fields may be double-quoted, "" escapes a quote.
// Quoted fields may span lines.
struct Row
{
    std::size_t line = 0; // 1-based line where the record starts
    std::vector<std::string> fields;
};

class Reader
{
public:
    Reader(std::istream& in, std::string source_name);

    // Reads the header row; subsequent rows can be accessed by column name.
    void read_header(const std::vector<std::string>& required);

    bool next(Row& row);

    const std::string& field(const Row& row, const std::string& column) const;
    bool has_column(const std::string& column) const { return index_.count(column) != 0; }
    const std::vector<std::string>& header() const { return header_; }

    [[noreturn]] void fail(std::size_t line, const std::string& msg) const;

private:
    std::istream& in_;
    std::string source_;
    std::size_t line_ = 0;
    std::vector<std::string> header_;
    std::unordered_map<std::string, std::size_t> index_;
};

std::string escape(const std::string& field);

class Writer
{
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    Writer& row(const std::vector<std::string>& fields);

private:
    std::ostream& out_;
};

double parse_double(const std::string& s, const Reader& r, std::size_t line);
long long parse_int(const std::string& s, const Reader& r, std::size_t line);

} // namespace xpa::csv
