#include "vbl/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "vbl/errors.hpp"

namespace vbl {

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open for writing: " + path);
    for (size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << "\n";
    const size_t rows = columns.empty() ? 0 : columns[0].size();
    out << std::setprecision(17);
    for (size_t r = 0; r < rows; ++r) {
        for (size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c][r];
        out << "\n";
    }
}

std::vector<std::vector<double>> read_csv(const std::string& path,
                                          std::vector<std::string>* header) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty CSV: " + path);
    std::vector<std::string> head;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) head.push_back(cell);
    }
    if (header) *header = head;
    std::vector<std::vector<double>> cols(head.size());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        size_t c = 0;
        while (std::getline(ss, cell, ',')) {
            if (c >= cols.size()) throw ParseError("ragged CSV row in " + path);
            cols[c++].push_back(std::stod(cell));
        }
        if (c != cols.size()) throw ParseError("short CSV row in " + path);
    }
    return cols;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open for writing: " + path);
    out << content;
}

std::string fnv1a_hex(const std::string& bytes) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ull;
    }
    std::ostringstream ss;
    ss << std::hex << std::setw(16) << std::setfill('0') << h;
    return ss.str();
}

std::string file_hash(const std::string& path) { return fnv1a_hex(read_file(path)); }

}  // namespace vbl
