import os

from hypothesis import settings

# derandomized so property tests are reproducible run to run
settings.register_profile("default", max_examples=100, derandomize=True, deadline=None)
settings.register_profile("thorough", max_examples=1000, derandomize=True, deadline=None)
settings.load_profile(os.environ.get("FOLM_TEST_PROFILE", "default"))
