#include "drpt/sample.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace drpt {

PooledSample PooledSample::continuous(std::vector<double> coords, std::size_t dim,
                                      std::size_t n, std::size_t m) {
    require(dim >= 1, ErrorCode::InvalidArgument, "continuous sample requires dim >= 1");
    require(n >= 1 && m >= 1, ErrorCode::InvalidArgument, "both sample sizes must be >= 1");
    require(coords.size() == (n + m) * dim, ErrorCode::InvalidArgument,
            "coordinate buffer size does not match (n+m)*dim");
    for (double v : coords) {
        require(std::isfinite(v), ErrorCode::InvalidArgument,
                "non-finite coordinate in sample");
    }
    PooledSample s;
    s.n_ = n;
    s.m_ = m;
    s.dim_ = dim;
    s.coords_ = std::move(coords);
    return s;
}

PooledSample PooledSample::categorical(std::vector<int> codes, std::size_t n, std::size_t m) {
    require(n >= 1 && m >= 1, ErrorCode::InvalidArgument, "both sample sizes must be >= 1");
    require(codes.size() == n + m, ErrorCode::InvalidArgument,
            "category buffer size does not match n+m");
    for (int c : codes) {
        require(c >= 0, ErrorCode::InvalidArgument, "category codes must be >= 0");
    }
    PooledSample s;
    s.n_ = n;
    s.m_ = m;
    s.dim_ = 0;
    s.codes_ = std::move(codes);
    return s;
}

std::size_t PooledSample::num_categories() const {
    require(is_categorical(), ErrorCode::DomainMismatch, "sample is not categorical");
    int hi = 0;
    for (int c : codes_) hi = std::max(hi, c);
    return static_cast<std::size_t>(hi) + 1;
}

PooledSample PooledSample::swapped() const {
    PooledSample s;
    s.n_ = m_;
    s.m_ = n_;
    s.dim_ = dim_;
    if (is_categorical()) {
        s.codes_.reserve(codes_.size());
        s.codes_.insert(s.codes_.end(), codes_.begin() + static_cast<std::ptrdiff_t>(n_),
                        codes_.end());
        s.codes_.insert(s.codes_.end(), codes_.begin(),
                        codes_.begin() + static_cast<std::ptrdiff_t>(n_));
    } else {
        s.coords_.reserve(coords_.size());
        const auto cut = coords_.begin() + static_cast<std::ptrdiff_t>(n_ * dim_);
        s.coords_.insert(s.coords_.end(), cut, coords_.end());
        s.coords_.insert(s.coords_.end(), coords_.begin(), cut);
    }
    return s;
}

PooledSample PooledSample::subset(const std::vector<std::size_t>& first_idx,
                                  const std::vector<std::size_t>& second_idx) const {
    require(!first_idx.empty() && !second_idx.empty(), ErrorCode::InvalidArgument,
            "subset requires points from both samples");
    PooledSample s;
    s.n_ = first_idx.size();
    s.m_ = second_idx.size();
    s.dim_ = dim_;
    auto push = [&](std::size_t i) {
        require(i < size(), ErrorCode::InvalidArgument, "subset index out of range");
        if (is_categorical()) {
            s.codes_.push_back(codes_[i]);
        } else {
            const auto p = point(i);
            s.coords_.insert(s.coords_.end(), p.begin(), p.end());
        }
    };
    for (std::size_t i : first_idx) push(i);
    for (std::size_t i : second_idx) push(i);
    return s;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
        std::size_t start = 0;
        while (start < field.size() && field[start] == ' ') ++start;
        fields.push_back(field.substr(start));
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_double(const std::string& s, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        fail(ErrorCode::ParseError,
             "csv line " + std::to_string(line_no) + ": cannot parse number '" + s + "'");
    }
}

} // namespace

CsvSample parse_sample_csv(const std::string& text) {
    std::stringstream in(text);
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), ErrorCode::ParseError, "empty csv");
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) {
        line.erase(0, 3); // strip UTF-8 BOM
    }
    const auto header = split_csv_line(line);

    int sample_col = -1, cat_col = -1, r_col = -1;
    std::vector<std::pair<int, int>> coord_cols; // (dimension index, column)
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string& h = header[c];
        if (h == "sample") {
            sample_col = static_cast<int>(c);
        } else if (h == "cat") {
            cat_col = static_cast<int>(c);
        } else if (h == "r") {
            r_col = static_cast<int>(c);
        } else if (h.size() >= 2 && h[0] == 'x') {
            int d = 0;
            try {
                d = std::stoi(h.substr(1));
            } catch (const std::exception&) {
                fail(ErrorCode::ParseError, "unrecognized csv column '" + h + "'");
            }
            require(d >= 1, ErrorCode::ParseError, "coordinate columns start at x1");
            coord_cols.emplace_back(d - 1, static_cast<int>(c));
        } else {
            fail(ErrorCode::ParseError, "unrecognized csv column '" + h + "'");
        }
    }
    require(sample_col >= 0, ErrorCode::ParseError, "csv is missing the `sample` column");
    require(cat_col >= 0 || !coord_cols.empty(), ErrorCode::ParseError,
            "csv needs either a `cat` column or x1..xd columns");
    require(cat_col < 0 || coord_cols.empty(), ErrorCode::ParseError,
            "csv cannot mix `cat` with coordinate columns");
    std::sort(coord_cols.begin(), coord_cols.end());
    for (std::size_t d = 0; d < coord_cols.size(); ++d) {
        require(coord_cols[d].first == static_cast<int>(d), ErrorCode::ParseError,
                "coordinate columns must be contiguous x1..xd");
    }
    const std::size_t dim = coord_cols.size();

    struct Row {
        int group;
        int cat = 0;
        double r = 0.0;
        std::vector<double> coords;
    };
    std::vector<Row> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        bool blank = true;
        for (char ch : line) {
            if (ch != '\r' && ch != ' ' && ch != '\t') { blank = false; break; }
        }
        if (blank) continue;
        const auto fields = split_csv_line(line);
        require(fields.size() == header.size(), ErrorCode::ParseError,
                "csv line " + std::to_string(line_no) + ": wrong number of fields");
        Row row;
        const double sv = parse_double(fields[static_cast<std::size_t>(sample_col)], line_no);
        require(sv == 1.0 || sv == 2.0, ErrorCode::ParseError,
                "csv line " + std::to_string(line_no) + ": `sample` must be 1 or 2");
        row.group = static_cast<int>(sv);
        if (cat_col >= 0) {
            const double cv = parse_double(fields[static_cast<std::size_t>(cat_col)], line_no);
            require(cv >= 0 && cv == std::floor(cv), ErrorCode::ParseError,
                    "csv line " + std::to_string(line_no) + ": `cat` must be a nonnegative integer");
            row.cat = static_cast<int>(cv);
        } else {
            row.coords.resize(dim);
            for (std::size_t d = 0; d < dim; ++d) {
                row.coords[d] =
                    parse_double(fields[static_cast<std::size_t>(coord_cols[d].second)], line_no);
            }
        }
        if (r_col >= 0) row.r = parse_double(fields[static_cast<std::size_t>(r_col)], line_no);
        rows.push_back(std::move(row));
    }

    std::size_t n = 0, m = 0;
    for (const auto& row : rows) (row.group == 1 ? n : m) += 1;
    require(n >= 1 && m >= 1, ErrorCode::ParseError, "csv must contain both samples");

    std::vector<double> coords;
    std::vector<int> codes;
    std::vector<double> rvals;
    coords.reserve(rows.size() * dim);
    for (int group : {1, 2}) {
        for (const auto& row : rows) {
            if (row.group != group) continue;
            if (cat_col >= 0) {
                codes.push_back(row.cat);
            } else {
                coords.insert(coords.end(), row.coords.begin(), row.coords.end());
            }
            if (r_col >= 0) rvals.push_back(row.r);
        }
    }

    CsvSample out{cat_col >= 0 ? PooledSample::categorical(std::move(codes), n, m)
                               : PooledSample::continuous(std::move(coords), dim, n, m),
                  std::move(rvals)};
    return out;
}

CsvSample read_sample_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorCode::IoError, "cannot open csv file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_sample_csv(buf.str());
}

} // namespace drpt
