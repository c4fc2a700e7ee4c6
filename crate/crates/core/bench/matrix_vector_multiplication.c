#include <mpi.h>
#include <stdio.h>
#define N 8
int main(int argc, char *argv[])
{
    int rank, size, i, j;
    double x[N], part[N], y[N];
    MPI_Init(&argc, &argv);
    MPI_Comm_rank(MPI_COMM_WORLD, &rank);
    MPI_Comm_size(MPI_COMM_WORLD, &size);
    for (j = 0; j < N; j++)
    {
        x[j] = rank == 0 ? j + 1.0 : 0.0;
        part[j] = 0.0;
    }
    MPI_Bcast(x, N, MPI_DOUBLE, 0, MPI_COMM_WORLD);
    for (i = rank; i < N; i += size)
    {
        for (j = 0; j < N; j++)
        {
            part[i] += (i + 2.0 * j) * x[j];
        }
    }
    MPI_Reduce(part, y, N, MPI_DOUBLE, MPI_SUM, 0, MPI_COMM_WORLD);
    for (i = 0; rank == 0 && i < N; i++)
    {
        printf("%.4f\n", y[i]);
    }
    MPI_Finalize();
    return 0;
}
