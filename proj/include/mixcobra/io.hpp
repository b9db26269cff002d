#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "mixcobra/dataset.hpp"
#include "mixcobra/error_table.hpp"

namespace mixcobra {

// CSV parse/validation failure; carries the 1-based file line when known.
class CsvError : public std::runtime_error {
public:
    CsvError(std::string message, std::size_t line = 0)
        : std::runtime_error(line > 0 ? message + " at row " + std::to_string(line) : message),
          line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Dataset files carry a header `x1,...,xd,y` followed by one row per point.
// UTF-8, comma separated, '.' decimal point, LF line endings.
Dataset load_dataset(const std::string& path, Task task);
void save_dataset(const Dataset& data, const std::string& path);

// Prediction files carry one uniquely named column per machine, row-aligned
// with their dataset file.
MachinePredictions load_predictions(const std::string& path, std::size_t expected_n);

// Schema: machine, mean_error, std_error, wins; means/stds/wins with 6
// decimal places. Re-saving an unchanged table is byte-identical.
void save_error_table(const ErrorTable& table, const std::string& path);

}  // namespace mixcobra
