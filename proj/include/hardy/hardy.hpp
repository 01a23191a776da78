#pragma once

#include "hardy/errors.hpp"
#include "hardy/numeric.hpp"
#include "hardy/sequence.hpp"
#include "hardy/tail_bounds.hpp"
#include "hardy/hardy_operators.hpp"
#include "hardy/weight_classes.hpp"
#include "hardy/inequality_verifier.hpp"
#include "hardy/extrapolation.hpp"
#include "hardy/lemma_oracles.hpp"
#include "hardy/mini_language.hpp"
