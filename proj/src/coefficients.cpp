#include "kinmv/coefficients.hpp"

#include <utility>

#include "kinmv/errors.hpp"

namespace kinmv {

CoefficientSet::CoefficientSet(std::string name, Kernel drift0, Kernel drift1,
                               Kernel diffusion, Constants constants)
    : CoefficientSet(std::move(name),
                     std::make_shared<const Kernel>(std::move(drift0)),
                     std::make_shared<const Kernel>(std::move(drift1)),
                     std::make_shared<const Kernel>(std::move(diffusion)),
                     std::move(constants)) {}

CoefficientSet::CoefficientSet(std::string name,
                               std::shared_ptr<const Kernel> drift0,
                               std::shared_ptr<const Kernel> drift1,
                               std::shared_ptr<const Kernel> diffusion,
                               Constants constants)
    : CoefficientField(std::move(name), drift0->d(), CompiledKernel::Raw(drift0),
                       CompiledKernel::Raw(drift1),
                       CompiledKernel::Raw(diffusion), std::move(constants)),
      drift0_kernel_(std::move(drift0)),
      drift1_kernel_(std::move(drift1)),
      diffusion_kernel_(std::move(diffusion)) {}

namespace terms {

SeparableTerm Constant(std::vector<double> value) {
  SeparableTerm term;
  term.state = [value = std::move(value)](double, std::span<const double>,
                                          std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = value[i];
  };
  return term;
}

}  // namespace terms
}  // namespace kinmv
