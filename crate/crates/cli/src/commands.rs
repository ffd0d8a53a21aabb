use fdakit::dimred::{
    fpca_fit, fpca_transform, maxima_hunting, mrmr_select, recursive_maxima_hunting, rkhs_variable_selection,
    RkhsCovariance,
};
use fdakit::exploratory::{
    boxplot_stats, depth, depth_based_median, geometric_median, msplot_stats, outliergram_stats, sample_covariance,
    sample_mean, sample_variance, trimmed_mean,
};
use fdakit::io::{read_dataset, to_csv_string, to_json_string, to_json_value, Dataset};
use fdakit::registration::{
    elastic_register, landmark_elastic_register, landmark_shift_register, least_squares_shift_register,
    ElasticOptions, LeastSquaresShiftOptions,
};
use fdakit::simulate::{make_gaussian_process, make_multimodal, CovarianceKernel, MultimodalSpec, ProcessMean};
use fdakit::smoothing::{parameter_search, smooth, Kernel, PenaltyFunction, Scorer, SmootherSpec};
use fdakit::{BasisSpec, GridSample, LinearDifferentialOperator};
use nalgebra::DMatrix;
use serde_json::{json, Value};

use crate::args::*;
use crate::svg;
use crate::CliError;

type Outcome = Result<String, CliError>;

pub(crate) fn execute(command: &Command) -> Outcome {
    match command {
        Command::Simulate(a) => simulate(a),
        Command::Smooth(a) => smooth_command(a),
        Command::Register(a) => register(a),
        Command::Fpca(a) => fpca(a),
        Command::Select(a) => select(a),
        Command::Stats(a) => stats(a),
        Command::Depth(a) => depth_command(a),
        Command::Outliers(a) => outliers(a),
        Command::Plot(a) => plot(a),
    }
}

fn emit(value: Value) -> Outcome {
    Ok(format!("{value}\n"))
}

fn load(io: &IoArgs) -> Result<GridSample, CliError> {
    Ok(read_dataset(&io.input)?.to_grid(None)?)
}

fn dataset_value(sample: GridSample) -> Value {
    to_json_value(&Dataset::Grid(sample))
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

fn simulate(args: &SimulateArgs) -> Outcome {
    let sample = match args.generator {
        Generator::Gp => {
            let kernel = match args.kernel {
                KernelKind::Brownian => CovarianceKernel::Brownian { variance: args.variance },
                KernelKind::Exponential => CovarianceKernel::Exponential {
                    variance: args.variance,
                    length_scale: args.length_scale,
                },
                KernelKind::Gaussian => CovarianceKernel::Gaussian {
                    variance: args.variance,
                    length_scale: args.length_scale,
                },
                KernelKind::Matern => CovarianceKernel::Matern {
                    variance: args.variance,
                    length_scale: args.length_scale,
                    nu: args.nu,
                },
                KernelKind::Polynomial => CovarianceKernel::Polynomial {
                    variance: args.variance,
                    bias: args.bias,
                    slope: args.slope,
                    degree: args.degree,
                },
            };
            kernel.validate()?;
            make_gaussian_process(args.n, args.points, &ProcessMean::Constant(args.mean), &kernel, args.seed)?
        }
        Generator::Multimodal => {
            let mut spec = MultimodalSpec::new(args.n, args.modes, args.noise_sd, args.seed);
            spec.n_points = args.points;
            make_multimodal(&spec)?
        }
    };
    Ok(match args.format {
        Format::Csv => to_csv_string(&sample),
        Format::Json => to_json_string(&Dataset::Grid(sample)) + "\n",
    })
}

fn smooth_command(args: &SmoothArgs) -> Outcome {
    if args.param.len() > 1 && args.search.is_none() {
        return Err(usage("several --param values need --search"));
    }
    if args.method == SmoothMethod::Knn && args.param.iter().any(|k| !(*k >= 1.0 && k.fract() == 0.0)) {
        return Err(usage("--param must hold positive integers for knn"));
    }
    let sample = load(&args.io)?;
    let kernel = match args.kernel {
        KernelName::Gaussian => Kernel::Gaussian,
        KernelName::Uniform => Kernel::Uniform,
        KernelName::Epanechnikov => Kernel::Epanechnikov,
    };
    let first = args.param[0];
    let template = match args.method {
        SmoothMethod::Nw => SmootherSpec::NadarayaWatson { bandwidth: first, kernel },
        SmoothMethod::Llr => SmootherSpec::LocalLinear { bandwidth: first, kernel },
        SmoothMethod::Knn => SmootherSpec::KNeighbors { k: first as usize },
        SmoothMethod::Basis => {
            let domain = sample.domain_range();
            let basis = match args.basis {
                BasisName::Bspline => BasisSpec::bspline(domain, args.n_basis)?,
                BasisName::Fourier => BasisSpec::fourier(domain, args.n_basis)?,
                BasisName::Monomial => BasisSpec::monomial(domain, args.n_basis)?,
            };
            SmootherSpec::Basis {
                basis,
                lambda: first,
                operator: LinearDifferentialOperator::derivative(args.derivative),
            }
        }
    };
    let Some(search) = args.search else {
        let spec = template.with_parameter(first)?;
        let smoothed = smooth(&spec, &sample)?;
        return emit(json!({
            "method": spec.name(),
            "parameter": first,
            "dataset": dataset_value(smoothed),
        }));
    };
    let scorer = match search {
        Search::Loo => Scorer::LeaveOneOut,
        Search::Gcv => Scorer::Gcv(match args.penalty {
            Penalty::Default => PenaltyFunction::Gcv,
            Penalty::Akaike => PenaltyFunction::Akaike,
            Penalty::Shibata => PenaltyFunction::Shibata,
        }),
    };
    let result = parameter_search(&template, &args.param, scorer, &sample)?;
    let scores: Vec<Value> = result
        .scores
        .iter()
        .map(|entry| match &entry.score {
            Ok(s) => json!({ "parameter": entry.parameter, "score": s }),
            Err(e) => json!({ "parameter": entry.parameter, "error": e.name() }),
        })
        .collect();
    let smoothed = smooth(&result.best_spec, &sample)?;
    emit(json!({
        "method": result.best_spec.name(),
        "parameter": result.best_parameter,
        "score": result.best_score,
        "scores": scores,
        "dataset": dataset_value(smoothed),
    }))
}

fn register(args: &RegisterArgs) -> Outcome {
    let needs_landmarks = matches!(args.method, RegisterMethod::LandmarkShift | RegisterMethod::LandmarkElastic);
    if needs_landmarks && args.landmarks.is_none() {
        return Err(usage("--landmarks is required for landmark registration"));
    }
    if args.method == RegisterMethod::LandmarkShift {
        let rows = &args.landmarks.as_ref().expect("checked above").0;
        if rows.iter().any(|r| r.len() != 1) {
            return Err(usage("landmark-shift takes exactly one landmark per curve"));
        }
        if args.target.as_ref().is_some_and(|t| t.len() != 1) {
            return Err(usage("landmark-shift takes a single --target"));
        }
    }
    let sample = load(&args.io)?;
    match args.method {
        RegisterMethod::Shift => {
            let defaults = LeastSquaresShiftOptions::default();
            let options = LeastSquaresShiftOptions {
                max_iter: args.max_iter.unwrap_or(defaults.max_iter),
                tol: args.tol.unwrap_or(defaults.tol),
                ..defaults
            };
            let result = least_squares_shift_register(&sample, &options)?;
            emit(json!({
                "method": "shift",
                "shifts": result.shifts.deltas(),
                "converged": result.converged,
                "iterations": result.iterations,
                "regsse_history": result.regsse_history,
                "dataset": dataset_value(result.registered),
            }))
        }
        RegisterMethod::LandmarkShift => {
            let landmarks: Vec<f64> = args.landmarks.as_ref().expect("checked above").0.iter().map(|r| r[0]).collect();
            let target = args.target.as_ref().map(|t| t[0]);
            let (registered, shifts) = landmark_shift_register(&sample, &landmarks, target, None)?;
            emit(json!({
                "method": "landmark-shift",
                "shifts": shifts.deltas(),
                "dataset": dataset_value(registered),
            }))
        }
        RegisterMethod::LandmarkElastic => {
            let landmarks = &args.landmarks.as_ref().expect("checked above").0;
            let (registered, warping) = landmark_elastic_register(&sample, landmarks, args.target.as_deref())?;
            emit(json!({
                "method": "landmark-elastic",
                "warping": rows(warping.sample().values()),
                "dataset": dataset_value(registered),
            }))
        }
        RegisterMethod::Elastic => {
            let defaults = ElasticOptions::default();
            let options = ElasticOptions {
                max_iter: args.max_iter.unwrap_or(defaults.max_iter),
                tol: args.tol.unwrap_or(defaults.tol),
                ..defaults
            };
            let result = elastic_register(&sample, &options)?;
            emit(json!({
                "method": "elastic",
                "warping": rows(result.warping.sample().values()),
                "template_srvf": result.template_srvf,
                "converged": result.converged,
                "iterations": result.iterations,
                "dataset": dataset_value(result.registered),
            }))
        }
    }
}

fn fpca(args: &FpcaArgs) -> Outcome {
    let sample = load(&args.io)?;
    let model = fpca_fit(&sample, args.components, args.lambda, None)?;
    let scores = fpca_transform(&model, &sample)?;
    emit(json!({
        "grid": model.grid().points(),
        "mean": model.mean(),
        "components": rows(model.components()),
        "eigenvalues": model.eigenvalues(),
        "explained_variance_ratio": model.explained_variance_ratio(),
        "total_variance": model.total_variance(),
        "scores": rows(&scores),
    }))
}

fn select(args: &SelectArgs) -> Outcome {
    let sample = load(&args.io)?;
    let result = match args.method {
        SelectMethod::Mrmr => mrmr_select(&sample, &args.labels, args.features.unwrap_or(1))?,
        SelectMethod::Rkhs => {
            let covariance = match args.covariance {
                CovarianceChoice::Pooled => RkhsCovariance::PooledWithinClass,
                CovarianceChoice::Marginal => RkhsCovariance::Marginal,
            };
            rkhs_variable_selection(&sample, &args.labels, args.features.unwrap_or(1), covariance)?
        }
        SelectMethod::Mh => maxima_hunting(&sample, &args.labels, args.features, args.window)?,
        SelectMethod::Rmh => recursive_maxima_hunting(
            &sample,
            &args.labels,
            args.features.unwrap_or(sample.n_points()),
            args.threshold,
        )?,
    };
    emit(serde_json::to_value(result).expect("selection results serialize"))
}

fn stats(args: &StatsArgs) -> Outcome {
    let sample = load(&args.io)?;
    let grid = sample.points().to_vec();
    let method = args.depth.into();
    let value = match args.statistic {
        Statistic::Mean => json!({ "statistic": "mean", "grid": grid, "values": sample_mean(&sample)? }),
        Statistic::Var => json!({ "statistic": "var", "grid": grid, "values": sample_variance(&sample)? }),
        Statistic::Cov => {
            json!({ "statistic": "cov", "grid": grid, "values": rows(&sample_covariance(&sample)?) })
        }
        Statistic::Median => {
            let (index, curve) = depth_based_median(&sample, method)?;
            json!({ "statistic": "median", "depth": method, "grid": grid, "index": index, "values": curve })
        }
        Statistic::GeometricMedian => {
            let gm = geometric_median(&sample, args.tol, args.max_iter)?;
            json!({
                "statistic": "geometric-median",
                "grid": grid,
                "values": gm.curve,
                "converged": gm.converged,
                "iterations": gm.iterations,
            })
        }
        Statistic::TrimmedMean => json!({
            "statistic": "trimmed-mean",
            "depth": method,
            "proportion": args.proportion,
            "grid": grid,
            "values": trimmed_mean(&sample, args.proportion, method)?,
        }),
    };
    emit(value)
}

fn depth_command(args: &DepthArgs) -> Outcome {
    let sample = load(&args.io)?;
    let report = depth(&sample, args.method.into())?;
    emit(serde_json::to_value(report).expect("depth reports serialize"))
}

fn outliers(args: &OutliersArgs) -> Outcome {
    let sample = load(&args.io)?;
    let value = match args.method {
        OutlierMethod::Boxplot => serde_json::to_value(boxplot_stats(&sample, args.depth.into(), args.factor, &args.prob)?),
        OutlierMethod::Msplot => serde_json::to_value(msplot_stats(&sample)?),
        OutlierMethod::Outliergram => serde_json::to_value(outliergram_stats(&sample)?),
    };
    emit(value.expect("outlier statistics serialize"))
}

fn plot(args: &PlotArgs) -> Outcome {
    if args.width < 100 || args.height < 100 {
        return Err(usage("plots need --width and --height of at least 100"));
    }
    let sample = load(&args.io)?;
    let canvas = svg::Canvas::new(args.width, args.height);
    Ok(match args.kind {
        PlotKind::Curves => svg::curves(&canvas, &sample),
        PlotKind::Boxplot => svg::boxplot(&canvas, &sample, &boxplot_stats(&sample, args.depth.into(), args.factor, &[])?),
        PlotKind::Msplot => svg::msplot(&canvas, &msplot_stats(&sample)?),
        PlotKind::Outliergram => svg::outliergram(&canvas, &outliergram_stats(&sample)?),
        PlotKind::FpcaPerturbation => {
            let model = fpca_fit(&sample, args.component + 1, 0.0, None)?;
            let curves = fdakit::dimred::fpca_perturbation(&model, args.component, args.multiple)?;
            svg::perturbation(&canvas, &curves, args.component)
        }
    })
}
