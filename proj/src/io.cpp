#include "mixcobra/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

namespace mixcobra {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(current);
            current.clear();
        } else if (ch != '\r') {
            current.push_back(ch);
        }
    }
    fields.push_back(current);
    return fields;
}

double parse_cell(const std::string& field, std::size_t line, std::size_t column) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw CsvError("cannot parse value '" + field + "' in column " + std::to_string(column + 1),
                       line);
    if (!std::isfinite(value))
        throw CsvError("non-finite value in column " + std::to_string(column + 1), line);
    return value;
}

// Shortest round-trip representation.
std::string format_double(double value) {
    char buffer[32];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, ptr);
}

std::string format_fixed6(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.6f", value);
    return buffer;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;  // parsed numeric cells
};

CsvTable read_numeric_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open file '" + path + "'");

    CsvTable table;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
        const auto fields = split_csv_line(line);
        if (line_number == 1) {
            table.header = fields;
            continue;
        }
        if (fields.size() != table.header.size())
            throw CsvError("ragged row: expected " + std::to_string(table.header.size()) +
                               " columns, found " + std::to_string(fields.size()),
                           line_number);
        std::vector<double> row(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c)
            row[c] = parse_cell(fields[c], line_number, c);
        table.rows.push_back(std::move(row));
    }
    if (table.header.empty()) throw CsvError("file '" + path + "' has no header row");
    return table;
}

}  // namespace

Dataset load_dataset(const std::string& path, Task task) {
    const CsvTable table = read_numeric_csv(path);
    if (table.header.size() < 2)
        throw CsvError("dataset needs at least one feature column and a target column");
    if (table.header.back() != "y")
        throw CsvError("last dataset column must be named 'y', found '" + table.header.back() + "'");
    if (table.rows.empty()) throw CsvError("dataset '" + path + "' has no data rows");

    const std::size_t d = table.header.size() - 1;
    Dataset data;
    data.task = task;
    data.features = Matrix(table.rows.size(), d);
    data.targets.resize(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        for (std::size_t c = 0; c < d; ++c) data.features(i, c) = table.rows[i][c];
        const double y = table.rows[i][d];
        const std::size_t line = i + 2;  // 1-based, after the header
        if (task == Task::classification && y != 0.0 && y != 1.0)
            throw CsvError("invalid label " + format_double(y), line);
        if (task == Task::regression && (y < 0.0 || y > 1.0))
            throw CsvError("regression target " + format_double(y) + " outside [0,1]", line);
        data.targets[i] = y;
    }
    data.validate();
    return data;
}

void save_dataset(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw CsvError("cannot write file '" + path + "'");
    for (std::size_t c = 0; c < data.dim(); ++c) out << 'x' << (c + 1) << ',';
    out << "y\n";
    for (std::size_t i = 0; i < data.n(); ++i) {
        for (std::size_t c = 0; c < data.dim(); ++c) out << format_double(data.features(i, c)) << ',';
        out << format_double(data.targets[i]) << '\n';
    }
    if (!out) throw CsvError("write failed for '" + path + "'");
}

MachinePredictions load_predictions(const std::string& path, std::size_t expected_n) {
    const CsvTable table = read_numeric_csv(path);

    std::set<std::string> seen;
    for (const auto& name : table.header)
        if (!seen.insert(name).second)
            throw CsvError("duplicate machine name '" + name + "' in '" + path + "'");

    if (table.rows.size() != expected_n)
        throw CsvError("prediction file has " + std::to_string(table.rows.size()) +
                       " rows but the dataset has " + std::to_string(expected_n));

    MachinePredictions preds;
    preds.machine_names = table.header;
    preds.values = Matrix(table.rows.size(), table.header.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i)
        for (std::size_t c = 0; c < table.header.size(); ++c)
            preds.values(i, c) = table.rows[i][c];
    return preds;
}

double ErrorTable::mean_error(std::size_t row) const {
    const std::size_t k = repetitions();
    double total = 0.0;
    for (std::size_t r = 0; r < k; ++r) total += errors(row, r);
    return total / static_cast<double>(k);
}

double ErrorTable::std_error(std::size_t row) const {
    const std::size_t k = repetitions();
    if (k < 2) return 0.0;
    const double mean = mean_error(row);
    double ss = 0.0;
    for (std::size_t r = 0; r < k; ++r) {
        const double d = errors(row, r) - mean;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(k - 1));
}

void save_error_table(const ErrorTable& table, const std::string& path) {
    if (table.repetitions() == 0) throw CsvError("no repetitions");
    if (table.names.size() != table.errors.rows())
        throw CsvError("error table rows do not match machine names");

    std::ofstream out(path);
    if (!out) throw CsvError("cannot write file '" + path + "'");
    out << "machine,mean_error,std_error,wins\n";
    for (std::size_t row = 0; row < table.row_count(); ++row) {
        out << table.names[row] << ',' << format_fixed6(table.mean_error(row)) << ','
            << format_fixed6(table.std_error(row)) << ','
            << format_fixed6(row < table.wins.size() ? table.wins[row] : 0.0) << '\n';
    }
    if (!out) throw CsvError("write failed for '" + path + "'");
}

}  // namespace mixcobra
