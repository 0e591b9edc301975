#pragma once

#include "ccpd/contrast.hpp"
#include "ccpd/corpus.hpp"
#include "ccpd/error.hpp"
#include "ccpd/indicators.hpp"
#include "ccpd/keyed_random.hpp"
#include "ccpd/logits.hpp"
#include "ccpd/mask.hpp"
#include "ccpd/ngram.hpp"
#include "ccpd/oracle.hpp"
#include "ccpd/orthography.hpp"
#include "ccpd/predictor.hpp"
#include "ccpd/voting.hpp"
