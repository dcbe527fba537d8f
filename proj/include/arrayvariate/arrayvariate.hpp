#pragma once

#include "arrayvariate/array.hpp"
#include "arrayvariate/densities.hpp"
#include "arrayvariate/errors.hpp"
#include "arrayvariate/io.hpp"
#include "arrayvariate/kronecker.hpp"
#include "arrayvariate/matrix.hpp"
#include "arrayvariate/monolinear.hpp"
#include "arrayvariate/multilinear.hpp"
#include "arrayvariate/sampling.hpp"
#include "arrayvariate/verify.hpp"
