#include "llsvm/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "llsvm/errors.hpp"

namespace llsvm {

namespace {

std::string strip(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& tok, double& out) {
    const char* c = tok.c_str();
    char* end = nullptr;
    errno = 0;
    out = std::strtod(c, &end);
    return end != c && *end == '\0' && errno != ERANGE;
}

int map_label(double v, const std::string& path, std::size_t line_no) {
    if (v == 1.0) return 1;
    if (v == -1.0) return -1;
    if (v == 0.0) return -1;
    throw DataError(path + ":" + std::to_string(line_no) +
                    ": label must be one of -1, 0, +1");
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t at = s.find(sep, start);
        if (at == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, at - start));
        start = at + 1;
    }
}

struct Line {
    std::string text;
    std::size_t number;
};

std::vector<Line> data_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path + ": cannot open for reading");
    std::vector<Line> out;
    std::string raw;
    std::size_t no = 0;
    while (std::getline(in, raw)) {
        ++no;
        std::string t = strip(raw);
        if (t.empty() || t[0] == '#') continue;
        out.push_back({std::move(t), no});
    }
    return out;
}

bool looks_like_header(const std::string& line) {
    std::string first = strip(split(line, ',')[0]);
    // sparse lines have no comma; take the first space token instead
    if (first.find(' ') != std::string::npos) first = strip(split(first, ' ')[0]);
    double v;
    return !parse_number(first, v);
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

LabeledDataset parse_dataset(const std::string& path, DataFormat format) {
    std::vector<Line> lines = data_lines(path);
    if (!lines.empty() && looks_like_header(lines.front().text))
        lines.erase(lines.begin());
    if (lines.empty()) throw DataError(path + ": no data rows");

    std::vector<double> pts;
    std::vector<int> labels;
    if (format == DataFormat::DenseCsv) {
        std::size_t dim = 0;
        for (const Line& ln : lines) {
            std::vector<std::string> cells = split(ln.text, ',');
            if (cells.size() < 2)
                throw DataError(path + ":" + std::to_string(ln.number) +
                                ": expected label plus at least one feature");
            if (dim == 0) dim = cells.size() - 1;
            if (cells.size() - 1 != dim)
                throw DataError(path + ":" + std::to_string(ln.number) + ": expected " +
                                std::to_string(dim + 1) + " columns, got " +
                                std::to_string(cells.size()));
            double v;
            if (!parse_number(strip(cells[0]), v))
                throw DataError(path + ":" + std::to_string(ln.number) + ": bad label field");
            labels.push_back(map_label(v, path, ln.number));
            for (std::size_t c = 1; c < cells.size(); ++c) {
                if (!parse_number(strip(cells[c]), v))
                    throw DataError(path + ":" + std::to_string(ln.number) +
                                    ": bad numeric field '" + strip(cells[c]) + "'");
                pts.push_back(v);
            }
        }
        try {
            return make_dataset(static_cast<int>(dim), std::move(pts), std::move(labels));
        } catch (const Error& e) {
            throw DataError(path + ": " + e.what());
        }
    }

    // sparse: label idx:val idx:val ...
    struct Row {
        int label;
        std::vector<std::pair<int, double>> entries;
    };
    std::vector<Row> rows;
    int dim = 0;
    for (const Line& ln : lines) {
        std::istringstream iss(ln.text);
        std::string tok;
        if (!(iss >> tok))
            throw DataError(path + ":" + std::to_string(ln.number) + ": empty row");
        double lv;
        if (!parse_number(tok, lv))
            throw DataError(path + ":" + std::to_string(ln.number) + ": bad label field");
        Row row;
        row.label = map_label(lv, path, ln.number);
        while (iss >> tok) {
            std::size_t colon = tok.find(':');
            if (colon == std::string::npos)
                throw DataError(path + ":" + std::to_string(ln.number) +
                                ": expected idx:value, got '" + tok + "'");
            double iv, vv;
            if (!parse_number(tok.substr(0, colon), iv) || iv < 1.0 ||
                iv != static_cast<double>(static_cast<int>(iv)))
                throw DataError(path + ":" + std::to_string(ln.number) +
                                ": feature index must be a positive integer");
            if (!parse_number(tok.substr(colon + 1), vv))
                throw DataError(path + ":" + std::to_string(ln.number) +
                                ": bad feature value in '" + tok + "'");
            int idx = static_cast<int>(iv);
            dim = std::max(dim, idx);
            row.entries.emplace_back(idx, vv);
        }
        rows.push_back(std::move(row));
    }
    if (dim == 0) throw DataError(path + ": sparse file has no features");
    pts.assign(rows.size() * static_cast<std::size_t>(dim), 0.0);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        labels.push_back(rows[r].label);
        for (auto [idx, val] : rows[r].entries)
            pts[r * static_cast<std::size_t>(dim) + static_cast<std::size_t>(idx - 1)] = val;
    }
    try {
        return make_dataset(dim, std::move(pts), std::move(labels));
    } catch (const Error& e) {
        throw DataError(path + ": " + e.what());
    }
}

void write_dataset(const std::string& path, const LabeledDataset& data,
                   const std::string& comment) {
    std::ofstream out(path);
    if (!out) throw DataError(path + ": cannot open for writing");
    if (!comment.empty()) out << "# " << comment << "\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        out << (data.labels[i] > 0 ? "1" : "-1");
        auto p = data.point(i);
        for (double v : p) out << ',' << format_double(v);
        out << '\n';
    }
    if (!out) throw DataError(path + ": write failed");
}

QuerySet read_query_points(const std::string& path, int dim) {
    std::vector<Line> lines = data_lines(path);
    if (!lines.empty() && looks_like_header(lines.front().text))
        lines.erase(lines.begin());
    if (lines.empty()) throw DataError(path + ": no data rows");
    QuerySet qs;
    bool labeled = false;
    bool first = true;
    for (const Line& ln : lines) {
        std::vector<std::string> cells = split(ln.text, ',');
        if (first) {
            if (cells.size() == static_cast<std::size_t>(dim)) {
                labeled = false;
            } else if (cells.size() == static_cast<std::size_t>(dim) + 1) {
                labeled = true;
            } else {
                throw DataError(path + ":" + std::to_string(ln.number) + ": expected " +
                                std::to_string(dim) + " or " + std::to_string(dim + 1) +
                                " columns, got " + std::to_string(cells.size()));
            }
            first = false;
        }
        std::size_t want = static_cast<std::size_t>(dim) + (labeled ? 1 : 0);
        if (cells.size() != want)
            throw DataError(path + ":" + std::to_string(ln.number) + ": expected " +
                            std::to_string(want) + " columns, got " +
                            std::to_string(cells.size()));
        std::size_t at = 0;
        if (labeled) {
            double v;
            if (!parse_number(strip(cells[0]), v))
                throw DataError(path + ":" + std::to_string(ln.number) + ": bad label field");
            qs.labels.push_back(map_label(v, path, ln.number));
            at = 1;
        }
        for (; at < cells.size(); ++at) {
            double v;
            if (!parse_number(strip(cells[at]), v))
                throw DataError(path + ":" + std::to_string(ln.number) +
                                ": bad numeric field '" + strip(cells[at]) + "'");
            qs.points.push_back(v);
        }
        ++qs.count;
    }
    return qs;
}

} // namespace llsvm
