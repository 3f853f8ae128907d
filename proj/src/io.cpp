#include "tdn/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace tdn {

void write_tensor(const std::string& path, const DenseTensor& T) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_tensor: cannot open '" + path + "'");
    out << T.order();
    for (std::size_t p : T.shape()) out << ',' << p;
    out << '\n';
    char buf[40];
    for (double v : T.values()) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf << '\n';
    }
    if (!out) throw std::runtime_error("write_tensor: write failed for '" + path + "'");
}

DenseTensor read_tensor(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_tensor: cannot open '" + path + "'");
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("read_tensor: missing header in '" + path + "'");

    std::vector<std::size_t> fields;
    std::stringstream ss(header);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            fields.push_back(static_cast<std::size_t>(std::stoull(tok)));
        } catch (...) {
            throw std::runtime_error("read_tensor: bad header field '" + tok + "' in '" + path + "'");
        }
    }
    if (fields.size() < 2 || fields[0] != fields.size() - 1)
        throw std::runtime_error("read_tensor: header order/extent mismatch in '" + path + "'");

    std::vector<std::size_t> shape(fields.begin() + 1, fields.end());
    std::size_t n = DenseTensor::checked_element_count(shape);
    std::vector<double> values;
    values.reserve(n);
    double v;
    while (in >> v) values.push_back(v);
    if (values.size() != n)
        throw std::runtime_error("read_tensor: expected " + std::to_string(n) + " values, got " +
                                 std::to_string(values.size()) + " in '" + path + "'");
    return DenseTensor(std::move(shape), std::move(values));
}

}  // namespace tdn
