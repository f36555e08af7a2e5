#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sgf {

enum class Taxonomy { kFixed, kVariable, kBank };

enum class Basis {
  kIdentity,
  kLinear,
  kImpulse,
  kMonomial,
  kPPR,
  kHK,
  kGaussian,
  kVarLinear,
  kVarMonomial,
  kHorner,
  kChebyshev,
  kChebInterp,
  kClenshaw,
  kBernstein,
  kLegendre,
  kJacobi,
  kFavard,
  kOptBasis,
  kAdaGNN,
  kFBGNN,
  kACMGNN,
  kFAGNN,
  kG2CN,
  kGNNLFHF,
  kFiGURe,
};

enum class Fusion { kSum, kConcat };

// Parsed filter description. Empty vectors mean "use the default".
struct FilterSpec {
  Basis basis = Basis::kIdentity;
  std::string name;  // as written; aliases such as FBGNNII keep their spelling
  int K = 10;
  std::vector<double> theta;
  std::vector<double> alpha;  // scalar hyperparameter or one per channel
  std::vector<double> beta;
  std::vector<double> gamma;
  Fusion fusion = Fusion::kSum;
  std::vector<double> favard_alpha;  // alpha_0..alpha_K
  std::vector<double> favard_beta;   // beta_0..beta_K
  std::vector<Basis> channels;       // FiGURe channel bases

  Taxonomy taxonomy() const;
};

Taxonomy taxonomy_of(Basis b);
std::string_view basis_name(Basis b);
std::optional<Basis> basis_from_name(std::string_view name);

// The 27 filter names in taxonomy order, aliases included.
const std::vector<std::string>& all_filter_names();

// Filters whose output is linear in theta for a fixed basis (fit_linear targets).
bool is_theta_linear(Basis b);
// False only for OptBasis, whose basis depends on the input signal.
bool is_signal_independent(Basis b);

// "name[:K=10][:alpha=0.5][:beta=1.0][:theta=a,b,...][:gamma=...][:fusion=sum]"
// plus favard_alpha=, favard_beta= and channels= for Favard and FiGURe.
FilterSpec parse_filter_spec(std::string_view text);
std::string format_filter_spec(const FilterSpec& spec);

// Checks lengths and domains. feature_dim, when known, validates AdaGNN gamma.
void validate(const FilterSpec& spec, std::optional<long> feature_dim = std::nullopt);

// Hyperparameters with defaults resolved.
double hyper_alpha(const FilterSpec& spec);
double hyper_beta(const FilterSpec& spec);
std::vector<double> channel_alpha(const FilterSpec& spec);
std::vector<double> channel_beta(const FilterSpec& spec);
std::vector<double> bank_gamma(const FilterSpec& spec);
std::vector<Basis> figure_channels(const FilterSpec& spec);
int channel_count(const FilterSpec& spec);

}  // namespace sgf
