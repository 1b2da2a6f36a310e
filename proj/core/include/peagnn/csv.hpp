#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace peagnn {

// Line-oriented delimited reader with RFC-4180 quoting (movie titles carry
// embedded commas and quotes). Tracks line numbers for ingestion errors.
class CsvReader {
public:
    CsvReader(const std::string& path, char delim = ',');

    // Reads one record into fields; returns false at end of file.
    // Throws IngestError on unterminated quotes or I/O failure.
    bool next(std::vector<std::string>& fields);

    std::size_t line() const { return line_; }
    const std::string& path() const { return path_; }

private:
    std::string path_;
    char delim_;
    std::ifstream in_;
    std::size_t line_ = 0;
};

}  // namespace peagnn
