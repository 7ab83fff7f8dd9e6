use std::path::Path;

fn header(script: &Path, data: &Path) -> String {
    let png = script.with_extension("png");
    format!(
        "set datafile separator ','\nset terminal pngcairo size 900,600\nset output '{}'\ndata = '{}'\nset key top right\n",
        png.display(),
        data.display()
    )
}

pub fn fis(script: &Path, data: &Path) -> String {
    header(script, data)
        + "set xlabel 'lambda'\nset ylabel 'chi'\nplot data using 1:2 skip 1 with lines lw 2 title 'chi(lambda)'\n"
}

pub fn evolve(script: &Path, data: &Path) -> String {
    header(script, data)
        + "set xlabel 'lambda'\nset ylabel 'population'\nset yrange [0:1]\n\
           plot data using 2:7 skip 1 with lines lw 2 title 'ground', \\\n     data using 2:8 skip 1 with lines lw 2 title 'excited'\n"
}

pub fn sweep(script: &Path, data: &Path, axis: &str, with_phase: bool) -> String {
    let mut s = header(script, data) + &format!("set xlabel '{axis}'\nset ylabel 'P'\nset yrange [0:1]\n");
    if with_phase {
        s += "set y2label '|dphi|/2pi'\nset y2range [0:0.5]\nset y2tics\nset ytics nomirror\n\
              plot data using 1:2 skip 1 with linespoints title 'P' axes x1y1, \\\n     \
              data using 1:(abs($3)/(2*pi)) skip 1 with linespoints title '|dphi|/2pi' axes x1y2\n";
    } else {
        s += "plot data using 1:2 skip 1 with linespoints title 'P'\n";
    }
    s
}
