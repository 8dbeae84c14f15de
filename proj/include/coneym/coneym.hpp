#pragma once

#include "coneym/algebra.hpp"
#include "coneym/cone.hpp"
#include "coneym/configurations.hpp"
#include "coneym/convergence.hpp"
#include "coneym/dual.hpp"
#include "coneym/errors.hpp"
#include "coneym/forms.hpp"
#include "coneym/functional.hpp"
#include "coneym/geometry.hpp"
#include "coneym/holonomy.hpp"
#include "coneym/multi_index.hpp"
#include "coneym/parallel.hpp"
#include "coneym/random_fields.hpp"
#include "coneym/serialization.hpp"
