macro_rules! example {
    ($module:ident, $file:literal, $test:ident) => {
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $test() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example!(distribution, "distribution.rs", distribution_example_runs);
example!(sampling, "sampling.rs", sampling_example_runs);
example!(fit_aircond, "fit_aircond.rs", fit_example_runs);
example!(derivatives, "derivatives.rs", derivatives_example_runs);
example!(lindley, "lindley.rs", lindley_example_runs);
example!(mcmc, "mcmc.rs", mcmc_example_runs);
example!(compare_models, "compare_models.rs", compare_example_runs);
example!(simulation, "simulation.rs", simulation_example_runs);
example!(run_record, "run_record.rs", run_record_example_runs);
