#include "gw/csv.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace gw {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::string csv_render(const std::vector<CsvRow>& rows) {
    std::string out;
    for (const CsvRow& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += csv_field(row[i]);
        }
        out += '\n';
    }
    return out;
}

void write_csv(const std::string& path, const std::vector<CsvRow>& rows) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("write_csv: cannot open " + path);
    f << csv_render(rows);
    if (!f)
        throw std::runtime_error("write_csv: write failed for " + path);
}

std::vector<CsvRow> parse_csv(const std::string& text) {
    std::vector<CsvRow> rows;
    CsvRow row;
    std::string field;
    bool quoted = false;
    bool any = false;
    size_t i = 0;
    const size_t n = text.size();
    while (i < n) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < n && text[i + 1] == '"') {
                    field += '"';
                    i += 2;
                } else {
                    quoted = false;
                    ++i;
                }
            } else {
                field += c;
                ++i;
            }
            continue;
        }
        switch (c) {
            case '"':
                quoted = true;
                any = true;
                ++i;
                break;
            case ',':
                row.push_back(std::move(field));
                field.clear();
                any = true;
                ++i;
                break;
            case '\r':
                ++i;
                if (i < n && text[i] == '\n') ++i;
                row.push_back(std::move(field));
                field.clear();
                rows.push_back(std::move(row));
                row.clear();
                any = false;
                break;
            case '\n':
                ++i;
                row.push_back(std::move(field));
                field.clear();
                rows.push_back(std::move(row));
                row.clear();
                any = false;
                break;
            default:
                field += c;
                any = true;
                ++i;
        }
    }
    if (quoted)
        throw std::runtime_error("parse_csv: unterminated quoted field");
    if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<CsvRow> read_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("read_csv: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
    return parse_csv(text);
}

std::string csv_num(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc())
        throw std::runtime_error("csv_num: conversion failed");
    return std::string(buf, res.ptr);
}

}  // namespace gw
