#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace latfront {

// Round-trip exact formatting, '.' decimal separator, LF line endings.
std::string format_double(double x);

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);

    void row(const std::vector<double>& values);
    void raw_row(const std::vector<std::string>& cells);
    void close();

private:
    std::ofstream out_;
    std::size_t columns_ = 0;
    std::string path_;
};

} // namespace latfront
