#include "peagnn/csv.hpp"

#include "peagnn/errors.hpp"

namespace peagnn {

CsvReader::CsvReader(const std::string& path, char delim)
    : path_(path), delim_(delim), in_(path, std::ios::binary) {
    if (!in_.is_open()) throw IngestError("cannot open " + path);
}

bool CsvReader::next(std::vector<std::string>& fields) {
    fields.clear();
    std::string raw;
    if (!std::getline(in_, raw)) return false;
    ++line_;

    std::string field;
    bool quoted = false;
    std::size_t i = 0;
    while (true) {
        if (i == raw.size()) {
            if (!quoted) break;
            // quoted field spans a newline; pull the next physical line
            std::string more;
            if (!std::getline(in_, more))
                throw IngestError(path_ + ":" + std::to_string(line_) + ": unterminated quote");
            ++line_;
            raw += '\n';
            raw += more;
        }
        const char c = raw[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < raw.size() && raw[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == delim_) {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\r' && i + 1 == raw.size()) {
            // swallow trailing CR of CRLF files
        } else {
            field += c;
        }
        ++i;
    }
    fields.push_back(std::move(field));
    return true;
}

}  // namespace peagnn
