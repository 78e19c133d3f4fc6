#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace earlystop {

// Shortest decimal form that round-trips a double exactly (17 significant
// digits); "nan"/"inf" spelled literally.
std::string format_double(double v);
double parse_double(const std::string& s);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

// Matrix as comma-separated rows (no header); vector as one value per row.
Eigen::MatrixXd load_matrix_csv(const std::string& path);
Eigen::VectorXd load_vector_csv(const std::string& path);

}  // namespace earlystop
