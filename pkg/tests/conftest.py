from hypothesis import HealthCheck, settings

# Fixed example sequence so test_output.txt is reproducible run to run.
settings.register_profile(
    "repro",
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("repro")
