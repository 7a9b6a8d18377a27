#ifndef PMDKIT_JSON_MATRIX_HPP
#define PMDKIT_JSON_MATRIX_HPP

#include "pmdkit/operators.hpp"

#include <json.hpp>

// Complex matrices serialize as paired row-major real arrays
//   {"re": [[...], ...], "im": [[...], ...]}
// in every JSON file this project reads or writes.

namespace pmdkit {

using Json = nlohmann::ordered_json;

inline Json matrix_to_json(const Matrix& m) {
  Json re = Json::array();
  Json im = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json re_row = Json::array();
    Json im_row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      re_row.push_back(m(i, j).real());
      im_row.push_back(m(i, j).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  return Json{{"re", std::move(re)}, {"im", std::move(im)}};
}

inline Matrix matrix_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("re") || !j.contains("im")) {
    throw InvalidInputError("matrix JSON must carry \"re\" and \"im\" arrays");
  }
  const Json& re = j.at("re");
  const Json& im = j.at("im");
  const std::size_t rows = re.size();
  if (rows == 0 || im.size() != rows) {
    throw InvalidInputError("matrix JSON: re/im row counts differ or empty");
  }
  const std::size_t cols = re.at(0).size();
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const Json& re_row = re.at(i);
    const Json& im_row = im.at(i);
    if (re_row.size() != cols || im_row.size() != cols) {
      throw InvalidInputError("matrix JSON: ragged rows");
    }
    for (std::size_t k = 0; k < cols; ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          Complex(re_row.at(k).get<double>(), im_row.at(k).get<double>());
    }
  }
  return m;
}

}  // namespace pmdkit

#endif  // PMDKIT_JSON_MATRIX_HPP
