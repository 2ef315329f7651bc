import os
import sys

from seisdata import SegyError, read_segy, write_gather


def main(segy_file, directory, trace_spacing):
    print("Converting %s into gathers under %s" % (segy_file, directory))
    segy = read_segy(segy_file, trace_spacing)
    os.makedirs(directory, exist_ok=True)
    for ensemble in segy.ensembles:
        path = os.path.join(directory, 'ensemble-%06d.sgth' % ensemble.number)
        print("Writing %d traces of ensemble %d to %s" % (ensemble.gather.shape[1], ensemble.number, path))
        write_gather(path, ensemble.gather)
    return len(segy.ensembles)


if __name__ == '__main__':
    if len(sys.argv) not in (3, 4):
        print("Usage: python %s [SEG-Y file] [output directory] [trace spacing in m, default 1]" % sys.argv[0])
        sys.exit(1)

    segy_file, directory = sys.argv[1:3]
    trace_spacing = float(sys.argv[3]) if len(sys.argv) == 4 else 1.0
    try:
        count = main(segy_file, directory, trace_spacing)
    except SegyError as e:
        print("Could not read %s: %s" % (segy_file, e))
        sys.exit(1)
    print("Done! Wrote %d gathers." % count)
