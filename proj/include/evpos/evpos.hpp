#pragma once

#include "evpos/checkers.hpp"
#include "evpos/dynamics.hpp"
#include "evpos/error.hpp"
#include "evpos/generators.hpp"
#include "evpos/io.hpp"
#include "evpos/linalg.hpp"
#include "evpos/matrix.hpp"
#include "evpos/positivity.hpp"
#include "evpos/spectral.hpp"
